#pragma once

#include "rtc/common.hpp"

#include <map>
#include <memory>
#include <set>
#include <vector>

namespace rtc {

struct SessionType;
using TypeRef = std::shared_ptr<const SessionType>;

enum class TypeKind { Bullet, Var, Rec, Tensor, Parr, Plus, With };

// Priority-annotated binary session types:
//   A, B ::= A (x)o B | A (+)o B... i.e. Tensor/Parr with priority o,
//   Plus/With with priority o and labeled branches, Bullet, mu X. A, X.
// Bullet and Var carry no priority (their priority is omega by definition).
struct SessionType {
    TypeKind kind = TypeKind::Bullet;
    Priority prio;                      // Tensor/Parr/Plus/With
    TypeRef left, right;                // Tensor/Parr
    std::map<Label, TypeRef> branches;  // Plus/With (sorted by label)
    RecVar var;                         // Var/Rec
    TypeRef body;                       // Rec
};

TypeRef t_bullet();
TypeRef t_var(RecVar x);
TypeRef t_rec(RecVar x, TypeRef body);
TypeRef t_tensor(TypeRef a, Priority o, TypeRef b);
TypeRef t_parr(TypeRef a, Priority o, TypeRef b);
TypeRef t_plus(Priority o, std::map<Label, TypeRef> bs);
TypeRef t_with(Priority o, std::map<Label, TypeRef> bs);

// Duality: connective-wise, preserving priorities; Bullet/Var structural,
// dual(mu X. A) = mu X. dual(A).
TypeRef dual(const TypeRef& a);

// pr(A): outermost connective priority; pr(Bullet) = pr(Var) = omega;
// pr(mu X. A) = pr(A).
Priority priority(const TypeRef& a);

// maxpr(A): highest finite priority occurring in A; Bullet/Var contribute 0.
std::uint64_t max_priority(const TypeRef& a);

// lift(t, A): add t to every connective priority; Bullet/Var unchanged.
TypeRef lift(std::uint64_t t, const TypeRef& a);

// Capture-avoiding substitution of `image` for free occurrences of X.
TypeRef subst_type(const TypeRef& a, const RecVar& x, const TypeRef& image);

// unfold^t(mu X. A) = A{ (mu X. lift(t, A)) / X }. Pre: a is Rec.
TypeRef unfold_session(std::uint64_t t, const TypeRef& a);

// Unfold Rec at the root (lift 0) until the head is not Rec.
// Terminates on contractive types.
TypeRef root_unfold(TypeRef a);

struct DeepUnfoldItem {
    RecVar var;
    std::uint64_t lift_by = 0;
    TypeRef body;
};
using DeepUnfoldSpec = std::vector<DeepUnfoldItem>;

// Deep unfolding: A{()} = A; A{(U..., (X,t,B))} = A{U...}{ mu X. lift(t, B{U...}) / X }.
TypeRef deep_unfold(const TypeRef& a, const DeepUnfoldSpec& spec);

// A is contractive on X iff it contains a connective, or ends in a variable
// other than X. (Equivalently: A is neither Bullet nor X up to mu-binders
// with no connective around them.)
bool contractive_session(const TypeRef& a, const RecVar& x);

std::set<RecVar> free_type_vars(const TypeRef& a);

// Alpha-structural equality (recursion binders compared by canonical position).
bool type_equal(const TypeRef& a, const TypeRef& b);

// Equality up to unfolding of recursive types (equirecursive, lift 0 at the
// root), with an assumption set so comparison terminates.
bool type_equal_unfolded(const TypeRef& a, const TypeRef& b);

} // namespace rtc
