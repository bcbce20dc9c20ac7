#pragma once

#include "rtc/common.hpp"
#include "rtc/types.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

namespace rtc {

// ---------------------------------------------------------------------------
// APCP processes:
//   P, Q ::= x[y,z] | x(y,z). P | x[z] <| l | x(z) |> { i: P_i }
//          | nu(x y) P | P || Q | 0 | x<->y | mu X(z~). P | X<z~>
//          | error<x~> | const x := v
// Restrictions may carry the session type of their first endpoint; the
// checker uses it as the cut type and the runtime keeps it up to date.
// The sugared actions x!(y). P and x! <| l. P of the paper are provided as
// builders that expand into the primitive grammar.
// ---------------------------------------------------------------------------

struct Process;
using ProcRef = std::shared_ptr<const Process>;

enum class ProcKind {
    Nil,
    Par,     // parts
    Res,     // nu(x y) body, optional ann = type of x
    Out,     // x[y,z]
    In,      // x(y,z). body  — binds y, z
    Sel,     // x[z] <| label
    Bra,     // x(z) |> {label: body} — binds z in every branch
    Fwd,     // x <-> y
    RecDef,  // mu var(params). body — params are free endpoints of the loop
    RecCall, // var<args>
    Alarm,   // error<args>
    ConstP,  // const x := literal (opaque payload carrier, typed Bullet)
};

struct Process {
    ProcKind kind = ProcKind::Nil;
    std::vector<ProcRef> parts;       // Par
    Endpoint x, y, z;                 // see per-kind comments above
    std::optional<TypeRef> ann;       // Res
    ProcRef body;                     // Res/In/RecDef
    Label label;                      // Sel
    std::map<Label, ProcRef> branches; // Bra
    RecVar var;                       // RecDef/RecCall
    std::vector<Endpoint> args;       // RecDef params / RecCall args / Alarm endpoints
    std::uint64_t unfold_lift = 0;    // RecDef: lift used when the runtime unfolds annotations
    std::uint64_t gen = 0;            // RecDef: unfolding generation (runtime bookkeeping)
    std::string literal;              // ConstP
};

ProcRef nil();
ProcRef par(std::vector<ProcRef> parts);
ProcRef par(ProcRef a, ProcRef b);
ProcRef res(Endpoint a, Endpoint b, ProcRef body, std::optional<TypeRef> ann = {});
ProcRef out(Endpoint x, Endpoint y, Endpoint z);
ProcRef in_(Endpoint x, Endpoint y, Endpoint z, ProcRef body);
ProcRef sel(Endpoint x, Endpoint z, Label l);
ProcRef bra(Endpoint x, Endpoint z, std::map<Label, ProcRef> branches);
ProcRef fwd(Endpoint x, Endpoint y);
ProcRef rec_def(RecVar var, std::vector<Endpoint> params, ProcRef body,
                std::uint64_t unfold_lift = 0, std::uint64_t gen = 0);
ProcRef rec_call(RecVar var, std::vector<Endpoint> args);
ProcRef alarm(std::vector<Endpoint> endpoints);
ProcRef constant(Endpoint x, std::string literal);

// Sugared actions (expanded on construction):
//   sug_out(x,y,P)   =  nu(y a) nu(z b) (x[a,b] || P{z/x})   "x!(y). P"
//   sug_sel(x,l,P)   =  nu(z b) (x[b] <| l || P{z/x})        "x! <| l. P"
//   sug_in(x,y,P)    =  x(y,z). P{z/x}                       "x(y). P"
//   sug_bra(x,Bs)    =  x(z) |> {i: P_i{z/x}}                "x |> {i: P_i}"
// In P, the caller refers to the continuation of x as x itself; the builder
// introduces the fresh continuation name. Optional annotations give the
// payload type (of y) and continuation type (of x's continuation).
ProcRef sug_out(Endpoint x, Endpoint y, ProcRef p, std::optional<TypeRef> payload_ann = {},
                std::optional<TypeRef> cont_ann = {});
ProcRef sug_sel(Endpoint x, Label l, ProcRef p, std::optional<TypeRef> cont_ann = {});
ProcRef sug_in(Endpoint x, Endpoint y, ProcRef p);
ProcRef sug_bra(Endpoint x, std::map<Label, ProcRef> branches);

std::set<Endpoint> free_endpoints(const ProcRef& p);

// Renames free endpoints; binders are left alone (they are globally unique,
// so capture cannot occur for names minted by `names()`).
ProcRef subst(const ProcRef& p, const std::map<Endpoint, Endpoint>& m);

// Fresh ids for every endpoint binder in the term (used when duplicating).
ProcRef refresh_bound(const ProcRef& p);

// Alpha-equivalence: binders (and recursion variables) by canonical position,
// free endpoints by id. Annotations and runtime bookkeeping are ignored.
bool alpha_equal(const ProcRef& a, const ProcRef& b);

// Alpha-equivalence with an explicit correspondence for free endpoints of `a`.
bool alpha_equal_mod(const ProcRef& a, const ProcRef& b,
                     const std::map<Endpoint, Endpoint>& free_map);

// Total deterministic order on terms (used to canonicalize parallel compositions).
int proc_compare(const ProcRef& a, const ProcRef& b);

} // namespace rtc
