#include "rtc/types.hpp"

#include <atomic>
#include <cassert>
#include <functional>
#include <optional>

namespace rtc {

NameGen& names() {
    static NameGen g;
    return g;
}

namespace {

std::shared_ptr<SessionType> node(TypeKind k) {
    auto n = std::make_shared<SessionType>();
    n->kind = k;
    return n;
}

// Fresh recursion-variable names for capture avoidance in type substitution.
RecVar fresh_type_var(const RecVar& base) {
    static std::atomic<std::uint64_t> ctr{0};
    return base + "'" + std::to_string(ctr.fetch_add(1) + 1);
}

} // namespace

TypeRef t_bullet() {
    static TypeRef b = node(TypeKind::Bullet);
    return b;
}

TypeRef t_var(RecVar x) {
    auto n = node(TypeKind::Var);
    n->var = std::move(x);
    return n;
}

TypeRef t_rec(RecVar x, TypeRef body) {
    auto n = node(TypeKind::Rec);
    n->var = std::move(x);
    n->body = std::move(body);
    return n;
}

TypeRef t_tensor(TypeRef a, Priority o, TypeRef b) {
    auto n = node(TypeKind::Tensor);
    n->left = std::move(a);
    n->right = std::move(b);
    n->prio = o;
    return n;
}

TypeRef t_parr(TypeRef a, Priority o, TypeRef b) {
    auto n = node(TypeKind::Parr);
    n->left = std::move(a);
    n->right = std::move(b);
    n->prio = o;
    return n;
}

TypeRef t_plus(Priority o, std::map<Label, TypeRef> bs) {
    assert(!bs.empty());
    auto n = node(TypeKind::Plus);
    n->branches = std::move(bs);
    n->prio = o;
    return n;
}

TypeRef t_with(Priority o, std::map<Label, TypeRef> bs) {
    assert(!bs.empty());
    auto n = node(TypeKind::With);
    n->branches = std::move(bs);
    n->prio = o;
    return n;
}

TypeRef dual(const TypeRef& a) {
    switch (a->kind) {
    case TypeKind::Bullet:
        return a;
    case TypeKind::Var:
        return a;
    case TypeKind::Rec:
        return t_rec(a->var, dual(a->body));
    case TypeKind::Tensor:
        return t_parr(dual(a->left), a->prio, dual(a->right));
    case TypeKind::Parr:
        return t_tensor(dual(a->left), a->prio, dual(a->right));
    case TypeKind::Plus: {
        std::map<Label, TypeRef> bs;
        for (auto& [l, t] : a->branches)
            bs.emplace(l, dual(t));
        return t_with(a->prio, std::move(bs));
    }
    case TypeKind::With: {
        std::map<Label, TypeRef> bs;
        for (auto& [l, t] : a->branches)
            bs.emplace(l, dual(t));
        return t_plus(a->prio, std::move(bs));
    }
    }
    return a;
}

Priority priority(const TypeRef& a) {
    switch (a->kind) {
    case TypeKind::Bullet:
    case TypeKind::Var:
        return Priority::omega();
    case TypeKind::Rec:
        return priority(a->body);
    default:
        return a->prio;
    }
}

std::uint64_t max_priority(const TypeRef& a) {
    switch (a->kind) {
    case TypeKind::Bullet:
    case TypeKind::Var:
        return 0;
    case TypeKind::Rec:
        return max_priority(a->body);
    case TypeKind::Tensor:
    case TypeKind::Parr:
        return std::max({a->prio.value(), max_priority(a->left), max_priority(a->right)});
    case TypeKind::Plus:
    case TypeKind::With: {
        std::uint64_t m = a->prio.value();
        for (auto& [l, t] : a->branches)
            m = std::max(m, max_priority(t));
        return m;
    }
    }
    return 0;
}

TypeRef lift(std::uint64_t t, const TypeRef& a) {
    if (t == 0)
        return a;
    switch (a->kind) {
    case TypeKind::Bullet:
    case TypeKind::Var:
        return a;
    case TypeKind::Rec:
        return t_rec(a->var, lift(t, a->body));
    case TypeKind::Tensor:
        return t_tensor(lift(t, a->left), a->prio.plus(t), lift(t, a->right));
    case TypeKind::Parr:
        return t_parr(lift(t, a->left), a->prio.plus(t), lift(t, a->right));
    case TypeKind::Plus:
    case TypeKind::With: {
        std::map<Label, TypeRef> bs;
        for (auto& [l, b] : a->branches)
            bs.emplace(l, lift(t, b));
        return a->kind == TypeKind::Plus ? t_plus(a->prio.plus(t), std::move(bs))
                                         : t_with(a->prio.plus(t), std::move(bs));
    }
    }
    return a;
}

std::set<RecVar> free_type_vars(const TypeRef& a) {
    std::set<RecVar> out;
    std::function<void(const TypeRef&, std::set<RecVar>&)> go =
        [&](const TypeRef& t, std::set<RecVar>& bound) {
            switch (t->kind) {
            case TypeKind::Bullet:
                return;
            case TypeKind::Var:
                if (!bound.count(t->var))
                    out.insert(t->var);
                return;
            case TypeKind::Rec: {
                bool fresh = bound.insert(t->var).second;
                go(t->body, bound);
                if (fresh)
                    bound.erase(t->var);
                return;
            }
            case TypeKind::Tensor:
            case TypeKind::Parr:
                go(t->left, bound);
                go(t->right, bound);
                return;
            case TypeKind::Plus:
            case TypeKind::With:
                for (auto& [l, b] : t->branches)
                    go(b, bound);
                return;
            }
        };
    std::set<RecVar> bound;
    go(a, bound);
    return out;
}

TypeRef subst_type(const TypeRef& a, const RecVar& x, const TypeRef& image) {
    switch (a->kind) {
    case TypeKind::Bullet:
        return a;
    case TypeKind::Var:
        return a->var == x ? image : a;
    case TypeKind::Rec: {
        if (a->var == x)
            return a; // shadowed
        if (free_type_vars(image).count(a->var)) {
            // rename the binder to avoid capturing a free variable of image
            RecVar nv = fresh_type_var(a->var);
            TypeRef body = subst_type(a->body, a->var, t_var(nv));
            return t_rec(nv, subst_type(body, x, image));
        }
        return t_rec(a->var, subst_type(a->body, x, image));
    }
    case TypeKind::Tensor:
        return t_tensor(subst_type(a->left, x, image), a->prio, subst_type(a->right, x, image));
    case TypeKind::Parr:
        return t_parr(subst_type(a->left, x, image), a->prio, subst_type(a->right, x, image));
    case TypeKind::Plus:
    case TypeKind::With: {
        std::map<Label, TypeRef> bs;
        for (auto& [l, b] : a->branches)
            bs.emplace(l, subst_type(b, x, image));
        return a->kind == TypeKind::Plus ? t_plus(a->prio, std::move(bs))
                                         : t_with(a->prio, std::move(bs));
    }
    }
    return a;
}

TypeRef unfold_session(std::uint64_t t, const TypeRef& a) {
    if (a->kind != TypeKind::Rec)
        throw std::invalid_argument("unfold_session: type is not recursive");
    return subst_type(a->body, a->var, t_rec(a->var, lift(t, a->body)));
}

TypeRef root_unfold(TypeRef a) {
    int guard = 0;
    while (a->kind == TypeKind::Rec) {
        a = unfold_session(0, a);
        if (++guard > 1000)
            throw std::logic_error("root_unfold: non-contractive recursion");
    }
    return a;
}

TypeRef deep_unfold(const TypeRef& a, const DeepUnfoldSpec& spec) {
    if (spec.empty())
        return a;
    DeepUnfoldSpec init(spec.begin(), spec.end() - 1);
    const DeepUnfoldItem& last = spec.back();
    TypeRef head = deep_unfold(a, init);
    TypeRef image = t_rec(last.var, lift(last.lift_by, deep_unfold(last.body, init)));
    return subst_type(head, last.var, image);
}

namespace {

bool contains_connective(const TypeRef& a) {
    switch (a->kind) {
    case TypeKind::Bullet:
    case TypeKind::Var:
        return false;
    case TypeKind::Rec:
        return contains_connective(a->body);
    default:
        return true;
    }
}

} // namespace

bool contractive_session(const TypeRef& a, const RecVar& x) {
    switch (a->kind) {
    case TypeKind::Bullet:
        return false;
    case TypeKind::Var:
        return a->var != x;
    case TypeKind::Rec:
        return a->var == x ? contains_connective(a->body) : contractive_session(a->body, x);
    default:
        return true;
    }
}

namespace {

bool type_eq(const TypeRef& a, const TypeRef& b, std::map<RecVar, int>& ba,
             std::map<RecVar, int>& bb, int depth) {
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case TypeKind::Bullet:
        return true;
    case TypeKind::Var: {
        auto ia = ba.find(a->var);
        auto ib = bb.find(b->var);
        if ((ia == ba.end()) != (ib == bb.end()))
            return false;
        if (ia == ba.end())
            return a->var == b->var; // both free
        return ia->second == ib->second;
    }
    case TypeKind::Rec: {
        std::optional<int> sa, sb;
        if (auto it = ba.find(a->var); it != ba.end())
            sa = it->second;
        if (auto it = bb.find(b->var); it != bb.end())
            sb = it->second;
        ba[a->var] = depth;
        bb[b->var] = depth;
        bool r = type_eq(a->body, b->body, ba, bb, depth + 1);
        if (sa)
            ba[a->var] = *sa;
        else
            ba.erase(a->var);
        if (sb)
            bb[b->var] = *sb;
        else
            bb.erase(b->var);
        return r;
    }
    case TypeKind::Tensor:
    case TypeKind::Parr:
        return a->prio == b->prio && type_eq(a->left, b->left, ba, bb, depth) &&
               type_eq(a->right, b->right, ba, bb, depth);
    case TypeKind::Plus:
    case TypeKind::With: {
        if (a->prio != b->prio || a->branches.size() != b->branches.size())
            return false;
        auto it = b->branches.begin();
        for (auto& [l, t] : a->branches) {
            if (it->first != l || !type_eq(t, it->second, ba, bb, depth))
                return false;
            ++it;
        }
        return true;
    }
    }
    return false;
}

// Canonical rendering for the equirecursive comparison's assumption set.
void key_render(const TypeRef& a, std::map<RecVar, int>& bound, int depth, std::string& out) {
    switch (a->kind) {
    case TypeKind::Bullet:
        out += "*";
        return;
    case TypeKind::Var: {
        auto i = bound.find(a->var);
        out += "V";
        out += i == bound.end() ? a->var : std::to_string(i->second);
        return;
    }
    case TypeKind::Rec: {
        std::optional<int> saved;
        if (auto it = bound.find(a->var); it != bound.end())
            saved = it->second;
        bound[a->var] = depth;
        out += "u.";
        key_render(a->body, bound, depth + 1, out);
        if (saved)
            bound[a->var] = *saved;
        else
            bound.erase(a->var);
        return;
    }
    case TypeKind::Tensor:
    case TypeKind::Parr:
        out += a->kind == TypeKind::Tensor ? "T" : "P";
        out += a->prio.str();
        out += "(";
        key_render(a->left, bound, depth, out);
        out += ",";
        key_render(a->right, bound, depth, out);
        out += ")";
        return;
    case TypeKind::Plus:
    case TypeKind::With:
        out += a->kind == TypeKind::Plus ? "S" : "W";
        out += a->prio.str();
        out += "{";
        for (auto& [l, t] : a->branches) {
            out += l;
            out += ":";
            key_render(t, bound, depth, out);
            out += ",";
        }
        out += "}";
        return;
    }
}

std::string type_key(const TypeRef& a) {
    std::string s;
    std::map<RecVar, int> bound;
    key_render(a, bound, 0, s);
    return s;
}

bool eq_unfolded(TypeRef a, TypeRef b, std::set<std::pair<std::string, std::string>>& assumed) {
    a = root_unfold(std::move(a));
    b = root_unfold(std::move(b));
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case TypeKind::Bullet:
        return true;
    case TypeKind::Var:
        return a->var == b->var;
    default:
        break;
    }
    auto key = std::make_pair(type_key(a), type_key(b));
    if (assumed.count(key))
        return true;
    assumed.insert(key);
    switch (a->kind) {
    case TypeKind::Tensor:
    case TypeKind::Parr:
        return a->prio == b->prio && eq_unfolded(a->left, b->left, assumed) &&
               eq_unfolded(a->right, b->right, assumed);
    case TypeKind::Plus:
    case TypeKind::With: {
        if (a->prio != b->prio || a->branches.size() != b->branches.size())
            return false;
        auto it = b->branches.begin();
        for (auto& [l, t] : a->branches) {
            if (it->first != l || !eq_unfolded(t, it->second, assumed))
                return false;
            ++it;
        }
        return true;
    }
    default:
        return false;
    }
}

} // namespace

bool type_equal(const TypeRef& a, const TypeRef& b) {
    std::map<RecVar, int> ba, bb;
    return type_eq(a, b, ba, bb, 0);
}

bool type_equal_unfolded(const TypeRef& a, const TypeRef& b) {
    if (type_equal(a, b))
        return true;
    std::set<std::pair<std::string, std::string>> assumed;
    return eq_unfolded(a, b, assumed);
}

} // namespace rtc
