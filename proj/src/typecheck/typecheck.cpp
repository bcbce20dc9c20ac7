#include "rtc/typecheck.hpp"

#include "rtc/surface.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace rtc {

std::string TypeError::str() const {
    std::string s = rule + "/" + reason + ": " + detail;
    if (endpoint)
        s += " [endpoint " + render_endpoint(*endpoint) + "]";
    if (var)
        s += " [variable " + *var + "]";
    if (o && pr)
        s += " [priority " + o->str() + " not below pr(context) = " + pr->str() + "]";
    if (span.known())
        s += " at " + span.str();
    return s;
}

Priority env_priority(const TypeEnv& gamma) {
    Priority m = Priority::omega();
    for (const auto& [e, t] : gamma)
        m = Priority::min(m, priority(t));
    return m;
}

TypeEnv lift_env(const TypeEnv& gamma, std::uint64_t t) {
    TypeEnv out;
    for (const auto& [e, a] : gamma)
        out.emplace(e, lift(t, a));
    return out;
}

bool bullet_equivalent(const TypeRef& a) {
    switch (a->kind) {
    case TypeKind::Bullet:
        return true;
    case TypeKind::Var:
        return false;
    case TypeKind::Rec:
        // no connective may be reachable, and the chain must not end in a
        // variable that is free in the whole type
        return !free_type_vars(a).size() && [&] {
            std::function<bool(const TypeRef&)> conn = [&](const TypeRef& t) {
                switch (t->kind) {
                case TypeKind::Bullet:
                case TypeKind::Var:
                    return false;
                case TypeKind::Rec:
                    return conn(t->body);
                default:
                    return true;
                }
            };
            return !conn(a);
        }();
    default:
        return false;
    }
}

CheckResult check_cut(const TypeRef& a, const TypeRef& b) {
    if (type_equal_unfolded(dual(a), b))
        return std::nullopt;
    TypeError e;
    e.rule = "Cycle";
    e.reason = "duality-mismatch";
    e.detail = "expected " + render_session(dual(a)) + ", got " + render_session(b);
    return e;
}

namespace {

TypeError basic_error(std::string rule, std::string reason, std::string detail,
                      std::optional<Endpoint> ep = {}) {
    TypeError e;
    e.rule = std::move(rule);
    e.reason = std::move(reason);
    e.detail = std::move(detail);
    e.endpoint = std::move(ep);
    return e;
}

// Atoms reachable without crossing a prefix: through parallel compositions and
// restrictions only. Used to infer missing cut types.
void spine_atoms(const ProcRef& p, std::vector<ProcRef>& out) {
    switch (p->kind) {
    case ProcKind::Par:
        for (const auto& q : p->parts)
            spine_atoms(q, out);
        return;
    case ProcKind::Res:
        spine_atoms(p->body, out);
        return;
    default:
        out.push_back(p);
    }
}

struct Checker {
    CheckOptions opts;
    DerivationStats* stats;

    void count(const char* rule) {
        if (stats)
            ++stats->rule_counts[rule];
    }
    void saw(const Priority& o) {
        if (stats && !o.is_omega())
            stats->max_priority = std::max(stats->max_priority, o.value());
    }

    // Discharge endpoints the term does not use; they must be unit-typed.
    CheckResult discharge(const ProcRef& p, TypeEnv& gamma) {
        auto fv = free_endpoints(p);
        for (auto it = gamma.begin(); it != gamma.end();) {
            if (fv.count(it->first)) {
                ++it;
                continue;
            }
            if (!bullet_equivalent(it->second))
                return basic_error("Bullet", "leftover-endpoint",
                                   "endpoint of type " + render_session(it->second) +
                                       " is never used",
                                   it->first);
            count("Bullet");
            it = gamma.erase(it);
        }
        return std::nullopt;
    }

    // Remove and return gamma(x), unfolded to its head connective.
    std::optional<TypeRef> take(TypeEnv& gamma, const Endpoint& x) {
        auto it = gamma.find(x);
        if (it == gamma.end())
            return std::nullopt;
        TypeRef t = root_unfold(it->second);
        gamma.erase(it);
        return t;
    }

    // First position at which both types carry a finite connective priority
    // determines the lift candidate between a context type and a stored type.
    std::optional<std::int64_t> find_lift(const TypeRef& have, const TypeRef& want,
                                          int budget = 512) const {
        if (budget <= 0)
            return std::nullopt;
        if (have->kind == TypeKind::Rec)
            return find_lift(root_unfold(have), want, budget - 1);
        if (want->kind == TypeKind::Rec)
            return find_lift(have, root_unfold(want), budget - 1);
        if (have->kind != want->kind)
            return std::nullopt;
        switch (have->kind) {
        case TypeKind::Bullet:
        case TypeKind::Var:
            return std::nullopt;
        case TypeKind::Tensor:
        case TypeKind::Parr: {
            if (!have->prio.is_omega() && !want->prio.is_omega())
                return static_cast<std::int64_t>(have->prio.value()) -
                       static_cast<std::int64_t>(want->prio.value());
            if (auto l = find_lift(have->left, want->left, budget - 1))
                return l;
            return find_lift(have->right, want->right, budget - 1);
        }
        case TypeKind::Plus:
        case TypeKind::With: {
            if (!have->prio.is_omega() && !want->prio.is_omega())
                return static_cast<std::int64_t>(have->prio.value()) -
                       static_cast<std::int64_t>(want->prio.value());
            for (const auto& [l, t] : have->branches) {
                auto it = want->branches.find(l);
                if (it == want->branches.end())
                    return std::nullopt;
                if (auto r = find_lift(t, it->second, budget - 1))
                    return r;
            }
            return std::nullopt;
        }
        default:
            return std::nullopt;
        }
    }

    CheckResult check(const ProcRef& p, const RecEnv& omega, TypeEnv gamma) {
        if (auto e = discharge(p, gamma))
            return e;

        switch (p->kind) {
        case ProcKind::Nil:
            count("Empty");
            return std::nullopt; // discharge emptied gamma

        case ProcKind::Par: {
            count("Mix");
            std::vector<std::set<Endpoint>> fvs;
            fvs.reserve(p->parts.size());
            for (const auto& q : p->parts)
                fvs.push_back(free_endpoints(q));
            std::vector<TypeEnv> envs(p->parts.size());
            for (const auto& [e, t] : gamma) {
                std::size_t owner = fvs.size();
                for (std::size_t i = 0; i < fvs.size(); ++i) {
                    if (!fvs[i].count(e))
                        continue;
                    if (owner != fvs.size())
                        return basic_error("Mix", "linearity",
                                           "endpoint used by two parallel components", e);
                    owner = i;
                }
                envs[owner].emplace(e, t); // owner exists: discharge kept users only
            }
            for (std::size_t i = 0; i < p->parts.size(); ++i)
                if (auto e = check(p->parts[i], omega, std::move(envs[i])))
                    return e;
            return std::nullopt;
        }

        case ProcKind::Res: {
            count("Cycle");
            TypeRef a;
            if (p->ann) {
                a = *p->ann;
            } else if (auto inferred = infer_cut(p, gamma)) {
                a = *inferred;
            } else {
                return basic_error("Cycle", "cannot-infer",
                                   "restriction needs a type annotation", p->x);
            }
            if (stats)
                stats->cut_types[p->x.id] = a;
            gamma.emplace(p->x, a);
            gamma.emplace(p->y, dual(a));
            return check(p->body, omega, std::move(gamma));
        }

        case ProcKind::Out: {
            count("Tensor");
            auto tx = take(gamma, p->x);
            if (!tx)
                return basic_error("Tensor", "unbound-endpoint", "output subject not in context",
                                   p->x);
            if ((*tx)->kind != TypeKind::Tensor)
                return basic_error("Tensor", "shape-mismatch",
                                   "output subject has type " + render_session(*tx), p->x);
            saw((*tx)->prio);
            auto ty = take(gamma, p->y);
            auto tz = take(gamma, p->z);
            if (!ty || !tz)
                return basic_error("Tensor", "unbound-endpoint", "output object not in context",
                                   !ty ? p->y : p->z);
            if (!type_equal_unfolded(*ty, dual((*tx)->left)))
                return basic_error("Tensor", "duality-mismatch",
                                   "payload endpoint: expected " +
                                       render_session(dual((*tx)->left)) + ", got " +
                                       render_session(*ty),
                                   p->y);
            if (!type_equal_unfolded(*tz, dual((*tx)->right)))
                return basic_error("Tensor", "duality-mismatch",
                                   "continuation endpoint: expected " +
                                       render_session(dual((*tx)->right)) + ", got " +
                                       render_session(*tz),
                                   p->z);
            return std::nullopt; // gamma empty: axiom consumed all three
        }

        case ProcKind::In: {
            count("Parr");
            auto tx = take(gamma, p->x);
            if (!tx)
                return basic_error("Parr", "unbound-endpoint", "input subject not in context",
                                   p->x);
            if ((*tx)->kind != TypeKind::Parr)
                return basic_error("Parr", "shape-mismatch",
                                   "input subject has type " + render_session(*tx), p->x);
            saw((*tx)->prio);
            Priority rest = env_priority(gamma);
            if (!((*tx)->prio < rest)) {
                TypeError e = basic_error("Parr", "priority-violation",
                                          "input may block a lower-priority action", p->x);
                e.o = (*tx)->prio;
                e.pr = rest;
                return e;
            }
            gamma.emplace(p->y, (*tx)->left);
            gamma.emplace(p->z, (*tx)->right);
            return check(p->body, omega, std::move(gamma));
        }

        case ProcKind::Sel: {
            count("Plus");
            auto tx = take(gamma, p->x);
            if (!tx)
                return basic_error("Plus", "unbound-endpoint",
                                   "selection subject not in context", p->x);
            if ((*tx)->kind != TypeKind::Plus)
                return basic_error("Plus", "shape-mismatch",
                                   "selection subject has type " + render_session(*tx), p->x);
            saw((*tx)->prio);
            auto br = (*tx)->branches.find(p->label);
            if (br == (*tx)->branches.end())
                return basic_error("Plus", "label-mismatch",
                                   "label " + p->label + " not offered by " +
                                       render_session(*tx),
                                   p->x);
            auto tz = take(gamma, p->z);
            if (!tz)
                return basic_error("Plus", "unbound-endpoint",
                                   "selection object not in context", p->z);
            if (!type_equal_unfolded(*tz, dual(br->second)))
                return basic_error("Plus", "duality-mismatch",
                                   "selection object: expected " +
                                       render_session(dual(br->second)) + ", got " +
                                       render_session(*tz),
                                   p->z);
            return std::nullopt;
        }

        case ProcKind::Bra: {
            count("With");
            auto tx = take(gamma, p->x);
            if (!tx)
                return basic_error("With", "unbound-endpoint",
                                   "branching subject not in context", p->x);
            if ((*tx)->kind != TypeKind::With)
                return basic_error("With", "shape-mismatch",
                                   "branching subject has type " + render_session(*tx), p->x);
            saw((*tx)->prio);
            if ((*tx)->branches.size() != p->branches.size() ||
                !std::equal(p->branches.begin(), p->branches.end(), (*tx)->branches.begin(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }))
                return basic_error("With", "label-mismatch",
                                   "branches offered do not match " + render_session(*tx),
                                   p->x);
            Priority rest = env_priority(gamma);
            if (!((*tx)->prio < rest)) {
                TypeError e = basic_error("With", "priority-violation",
                                          "branching may block a lower-priority action", p->x);
                e.o = (*tx)->prio;
                e.pr = rest;
                return e;
            }
            for (const auto& [l, q] : p->branches) {
                TypeEnv env = gamma;
                env.emplace(p->z, (*tx)->branches.at(l));
                if (auto e = check(q, omega, std::move(env)))
                    return e;
            }
            return std::nullopt;
        }

        case ProcKind::Fwd: {
            count("Id");
            auto tx = gamma.find(p->x);
            auto ty = gamma.find(p->y);
            if (tx == gamma.end() || ty == gamma.end())
                return basic_error("Id", "unbound-endpoint", "forwarder endpoint not in context",
                                   tx == gamma.end() ? p->x : p->y);
            if (auto e = check_cut(tx->second, ty->second)) {
                e->rule = "Id";
                e->endpoint = p->x;
                return e;
            }
            return std::nullopt;
        }

        case ProcKind::RecDef:
            return check_recdef(p, omega, std::move(gamma));

        case ProcKind::RecCall:
            return check_reccall(p, omega, std::move(gamma));

        case ProcKind::Alarm: {
            if (!opts.allow_alarm)
                return basic_error("Alarm", "alarm-forbidden",
                                   "alarm processes may not occur in implementations");
            count("Alarm");
            std::set<Endpoint> args(p->args.begin(), p->args.end());
            if (args.size() != p->args.size())
                return basic_error("Alarm", "linearity", "alarm lists an endpoint twice");
            for (const auto& e : p->args)
                if (!gamma.count(e))
                    return basic_error("Alarm", "unbound-endpoint",
                                       "alarm endpoint not in context", e);
            return std::nullopt; // types are arbitrary by the axiom
        }

        case ProcKind::ConstP: {
            count("Unit");
            auto it = gamma.find(p->x);
            if (it == gamma.end())
                return basic_error("Unit", "unbound-endpoint", "constant carrier not in context",
                                   p->x);
            if (!bullet_equivalent(it->second))
                return basic_error("Unit", "not-bullet",
                                   "constant carrier must have the unit type, got " +
                                       render_session(it->second),
                                   p->x);
            return std::nullopt;
        }
        }
        return basic_error("?", "internal", "unknown process form");
    }

    // Missing cut types can be recovered when one of the restricted endpoints
    // is the object of an output/selection atom on the spine whose subject is
    // typed by the context, or the peer of a forwarder whose other end is.
    std::optional<TypeRef> infer_cut(const ProcRef& resnode, const TypeEnv& gamma) const {
        const Endpoint& u = resnode->x;
        const Endpoint& v = resnode->y;
        std::vector<ProcRef> atoms;
        spine_atoms(resnode->body, atoms);
        for (const auto& a : atoms) {
            switch (a->kind) {
            case ProcKind::Out: {
                if (a->y != u && a->y != v && a->z != u && a->z != v)
                    break;
                auto it = gamma.find(a->x);
                if (it == gamma.end())
                    break;
                TypeRef t = root_unfold(it->second);
                // A subject of the wrong shape: pick the unit type so the
                // output axiom itself reports the precise error.
                if (t->kind != TypeKind::Tensor)
                    return t_bullet();
                if (a->y == u)
                    return dual(t->left);
                if (a->y == v)
                    return t->left;
                if (a->z == u)
                    return dual(t->right);
                return t->right;
            }
            case ProcKind::Sel: {
                if (a->z != u && a->z != v)
                    break;
                auto it = gamma.find(a->x);
                if (it == gamma.end())
                    break;
                TypeRef t = root_unfold(it->second);
                if (t->kind != TypeKind::Plus)
                    return t_bullet();
                auto br = t->branches.find(a->label);
                // Same for a label the type does not offer.
                if (br == t->branches.end())
                    return t_bullet();
                return a->z == u ? dual(br->second) : br->second;
            }
            case ProcKind::Fwd: {
                if (a->x == u || a->x == v) {
                    if (auto it = gamma.find(a->y); it != gamma.end())
                        return a->x == u ? dual(it->second) : it->second;
                }
                if (a->y == u || a->y == v) {
                    if (auto it = gamma.find(a->x); it != gamma.end())
                        return a->y == u ? dual(it->second) : it->second;
                }
                break;
            }
            default:
                break;
            }
        }
        // a cut both sides of which are unused carries the unit type
        auto fv = free_endpoints(resnode->body);
        if (!fv.count(u) && !fv.count(v))
            return t_bullet();
        return std::nullopt;
    }

    CheckResult check_recdef(const ProcRef& p, const RecEnv& omega, TypeEnv gamma) {
        count("Rec");
        std::set<Endpoint> params(p->args.begin(), p->args.end());
        if (params.size() != p->args.size())
            return basic_error("Rec", "linearity", "loop lists a parameter twice");
        std::vector<TypeRef> bodies;
        std::uint64_t mx = 0;
        for (const auto& z : p->args) {
            auto it = gamma.find(z);
            if (it == gamma.end())
                return basic_error("Rec", "unbound-endpoint", "loop parameter not in context",
                                   z);
            TypeRef t = it->second;
            if (t->kind != TypeKind::Rec) {
                TypeError e = basic_error("Rec", "shape-mismatch",
                                          "loop parameter needs a recursive type, got " +
                                              render_session(t),
                                          z);
                e.var = p->var;
                return e;
            }
            TypeRef body = t->body;
            if (t->var != p->var) {
                if (free_type_vars(body).count(p->var))
                    return basic_error("Rec", "variable-capture",
                                       "cannot align type variable " + t->var + " with " +
                                           p->var,
                                       z);
                body = subst_type(body, t->var, t_var(p->var));
            }
            if (body->kind == TypeKind::Var && body->var == p->var) {
                TypeError e = basic_error("Rec", "unguarded-variable",
                                          "loop parameter type is its own variable", z);
                e.var = p->var;
                return e;
            }
            if (!contractive_session(body, p->var)) {
                TypeError e = basic_error("Rec", "non-contractive",
                                          "loop parameter type " + render_session(t) +
                                              " is not contractive",
                                          z);
                e.var = p->var;
                return e;
            }
            mx = std::max(mx, max_priority(body));
            bodies.push_back(body);
        }
        for (const auto& [e, unused] : gamma) {
            (void)unused;
            if (!params.count(e)) {
                TypeError err = basic_error("Rec", "leftover-endpoint",
                                            "endpoint is live at a loop but is not one of its "
                                            "parameters",
                                            e);
                err.var = p->var;
                return err;
            }
        }
        std::uint64_t t = mx + 1;
        RecEnv omega2 = omega;
        omega2[p->var] = bodies;
        TypeEnv inner;
        for (std::size_t i = 0; i < p->args.size(); ++i)
            inner.emplace(p->args[i], unfold_session(t, t_rec(p->var, bodies[i])));
        return check(p->body, omega2, std::move(inner));
    }

    CheckResult check_reccall(const ProcRef& p, const RecEnv& omega, TypeEnv gamma) {
        count("Var");
        auto it = omega.find(p->var);
        if (it == omega.end()) {
            TypeError e = basic_error("Var", "unbound-recvar",
                                      "call outside the scope of its loop");
            e.var = p->var;
            return e;
        }
        const auto& bodies = it->second;
        if (bodies.size() != p->args.size()) {
            TypeError e = basic_error("Var", "arity-mismatch",
                                      "loop takes " + std::to_string(bodies.size()) +
                                          " endpoints, call passes " +
                                          std::to_string(p->args.size()));
            e.var = p->var;
            return e;
        }
        std::set<Endpoint> args(p->args.begin(), p->args.end());
        if (args.size() != p->args.size())
            return basic_error("Var", "linearity", "call lists an endpoint twice");
        std::optional<std::int64_t> t;
        for (std::size_t i = 0; i < p->args.size() && !t; ++i) {
            auto g = gamma.find(p->args[i]);
            if (g == gamma.end())
                return basic_error("Var", "unbound-endpoint", "call argument not in context",
                                   p->args[i]);
            t = find_lift(g->second, t_rec(p->var, bodies[i]));
        }
        if (t && *t < 0) {
            TypeError e = basic_error("Var", "lift-mismatch",
                                      "call argument types sit below the loop's types");
            e.var = p->var;
            return e;
        }
        std::uint64_t lift_by = t ? static_cast<std::uint64_t>(*t) : 0;
        for (std::size_t i = 0; i < p->args.size(); ++i) {
            auto g = gamma.find(p->args[i]);
            if (g == gamma.end())
                return basic_error("Var", "unbound-endpoint", "call argument not in context",
                                   p->args[i]);
            TypeRef want = lift(lift_by, t_rec(p->var, bodies[i]));
            if (!type_equal_unfolded(g->second, want)) {
                TypeError e = basic_error("Var", "lift-mismatch",
                                          "call argument: expected " + render_session(want) +
                                              ", got " + render_session(g->second),
                                          p->args[i]);
                e.var = p->var;
                return e;
            }
        }
        return std::nullopt;
    }
};

} // namespace

CheckResult typecheck(const ProcRef& p, const RecEnv& omega, const TypeEnv& gamma,
                      const CheckOptions& opts, DerivationStats* stats) {
    Checker c{opts, stats};
    return c.check(p, omega, gamma);
}

CheckResult typecheck_closed(const ProcRef& p, const CheckOptions& opts,
                             DerivationStats* stats) {
    return typecheck(p, {}, {}, opts, stats);
}

} // namespace rtc
