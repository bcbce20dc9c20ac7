#include "rtc/process.hpp"

#include <cassert>
#include <functional>

namespace rtc {

namespace {

std::shared_ptr<Process> pnode(ProcKind k) {
    auto n = std::make_shared<Process>();
    n->kind = k;
    return n;
}

} // namespace

ProcRef nil() {
    static ProcRef n = pnode(ProcKind::Nil);
    return n;
}

ProcRef par(std::vector<ProcRef> parts) {
    // Flatten nested parallels and drop units at construction.
    std::vector<ProcRef> flat;
    for (auto& p : parts) {
        if (p->kind == ProcKind::Nil)
            continue;
        if (p->kind == ProcKind::Par) {
            for (auto& q : p->parts)
                flat.push_back(q);
        } else {
            flat.push_back(p);
        }
    }
    if (flat.empty())
        return nil();
    if (flat.size() == 1)
        return flat[0];
    auto n = pnode(ProcKind::Par);
    n->parts = std::move(flat);
    return n;
}

ProcRef par(ProcRef a, ProcRef b) { return par(std::vector<ProcRef>{std::move(a), std::move(b)}); }

ProcRef res(Endpoint a, Endpoint b, ProcRef body, std::optional<TypeRef> ann) {
    auto n = pnode(ProcKind::Res);
    n->x = std::move(a);
    n->y = std::move(b);
    n->body = std::move(body);
    n->ann = std::move(ann);
    return n;
}

ProcRef out(Endpoint x, Endpoint y, Endpoint z) {
    auto n = pnode(ProcKind::Out);
    n->x = std::move(x);
    n->y = std::move(y);
    n->z = std::move(z);
    return n;
}

ProcRef in_(Endpoint x, Endpoint y, Endpoint z, ProcRef body) {
    auto n = pnode(ProcKind::In);
    n->x = std::move(x);
    n->y = std::move(y);
    n->z = std::move(z);
    n->body = std::move(body);
    return n;
}

ProcRef sel(Endpoint x, Endpoint z, Label l) {
    auto n = pnode(ProcKind::Sel);
    n->x = std::move(x);
    n->z = std::move(z);
    n->label = std::move(l);
    return n;
}

ProcRef bra(Endpoint x, Endpoint z, std::map<Label, ProcRef> branches) {
    assert(!branches.empty());
    auto n = pnode(ProcKind::Bra);
    n->x = std::move(x);
    n->z = std::move(z);
    n->branches = std::move(branches);
    return n;
}

ProcRef fwd(Endpoint x, Endpoint y) {
    auto n = pnode(ProcKind::Fwd);
    n->x = std::move(x);
    n->y = std::move(y);
    return n;
}

ProcRef rec_def(RecVar var, std::vector<Endpoint> params, ProcRef body, std::uint64_t unfold_lift,
                std::uint64_t gen) {
    auto n = pnode(ProcKind::RecDef);
    n->var = std::move(var);
    n->args = std::move(params);
    n->body = std::move(body);
    n->unfold_lift = unfold_lift;
    n->gen = gen;
    return n;
}

ProcRef rec_call(RecVar var, std::vector<Endpoint> args) {
    auto n = pnode(ProcKind::RecCall);
    n->var = std::move(var);
    n->args = std::move(args);
    return n;
}

ProcRef alarm(std::vector<Endpoint> endpoints) {
    auto n = pnode(ProcKind::Alarm);
    n->args = std::move(endpoints);
    return n;
}

ProcRef constant(Endpoint x, std::string literal) {
    auto n = pnode(ProcKind::ConstP);
    n->x = std::move(x);
    n->literal = std::move(literal);
    return n;
}

ProcRef sug_out(Endpoint x, Endpoint y, ProcRef p, std::optional<TypeRef> payload_ann,
                std::optional<TypeRef> cont_ann) {
    Endpoint a = names().fresh("~" + y.hint);
    Endpoint z = names().fresh(x.hint);
    Endpoint b = names().fresh("~" + x.hint);
    ProcRef cont = subst(p, {{x, z}});
    return res(y, a,
               res(z, b, par(out(x, a, b), std::move(cont)), std::move(cont_ann)),
               std::move(payload_ann));
}

ProcRef sug_sel(Endpoint x, Label l, ProcRef p, std::optional<TypeRef> cont_ann) {
    Endpoint z = names().fresh(x.hint);
    Endpoint b = names().fresh("~" + x.hint);
    ProcRef cont = subst(p, {{x, z}});
    return res(z, b, par(sel(x, b, std::move(l)), std::move(cont)), std::move(cont_ann));
}

ProcRef sug_in(Endpoint x, Endpoint y, ProcRef p) {
    Endpoint z = names().fresh(x.hint);
    return in_(x, std::move(y), z, subst(p, {{x, z}}));
}

ProcRef sug_bra(Endpoint x, std::map<Label, ProcRef> branches) {
    Endpoint z = names().fresh(x.hint);
    std::map<Label, ProcRef> bs;
    for (auto& [l, p] : branches)
        bs.emplace(l, subst(p, {{x, z}}));
    return bra(x, z, std::move(bs));
}

std::set<Endpoint> free_endpoints(const ProcRef& p) {
    std::set<Endpoint> out;
    std::function<void(const ProcRef&, std::set<std::uint64_t>&)> go =
        [&](const ProcRef& n, std::set<std::uint64_t>& bound) {
            auto add = [&](const Endpoint& e) {
                if (!bound.count(e.id))
                    out.insert(e);
            };
            switch (n->kind) {
            case ProcKind::Nil:
                return;
            case ProcKind::Par:
                for (auto& q : n->parts)
                    go(q, bound);
                return;
            case ProcKind::Res: {
                bool bx = bound.insert(n->x.id).second;
                bool by = bound.insert(n->y.id).second;
                go(n->body, bound);
                if (bx)
                    bound.erase(n->x.id);
                if (by)
                    bound.erase(n->y.id);
                return;
            }
            case ProcKind::Out:
                add(n->x);
                add(n->y);
                add(n->z);
                return;
            case ProcKind::In: {
                add(n->x);
                bool by = bound.insert(n->y.id).second;
                bool bz = bound.insert(n->z.id).second;
                go(n->body, bound);
                if (by)
                    bound.erase(n->y.id);
                if (bz)
                    bound.erase(n->z.id);
                return;
            }
            case ProcKind::Sel:
                add(n->x);
                add(n->z);
                return;
            case ProcKind::Bra: {
                add(n->x);
                bool bz = bound.insert(n->z.id).second;
                for (auto& [l, q] : n->branches)
                    go(q, bound);
                if (bz)
                    bound.erase(n->z.id);
                return;
            }
            case ProcKind::Fwd:
                add(n->x);
                add(n->y);
                return;
            case ProcKind::RecDef:
                for (auto& e : n->args)
                    add(e);
                go(n->body, bound);
                return;
            case ProcKind::RecCall:
            case ProcKind::Alarm:
                for (auto& e : n->args)
                    add(e);
                return;
            case ProcKind::ConstP:
                add(n->x);
                return;
            }
        };
    std::set<std::uint64_t> bound;
    go(p, bound);
    return out;
}

namespace {

using Renaming = std::map<Endpoint, Endpoint>;

Endpoint ap(const Renaming& m, const Endpoint& e) {
    auto it = m.find(e);
    return it == m.end() ? e : it->second;
}

ProcRef rewrite(const ProcRef& n, const Renaming& m, bool refresh) {
    switch (n->kind) {
    case ProcKind::Nil:
        return n;
    case ProcKind::Par: {
        std::vector<ProcRef> parts;
        parts.reserve(n->parts.size());
        for (auto& q : n->parts)
            parts.push_back(rewrite(q, m, refresh));
        return par(std::move(parts));
    }
    case ProcKind::Res: {
        if (refresh) {
            Renaming m2 = m;
            m2[n->x] = names().fresh(n->x.hint);
            m2[n->y] = names().fresh(n->y.hint);
            return res(m2[n->x], m2[n->y], rewrite(n->body, m2, refresh), n->ann);
        }
        Renaming m2 = m;
        m2.erase(n->x);
        m2.erase(n->y);
        return res(n->x, n->y, m2.empty() ? n->body : rewrite(n->body, m2, refresh), n->ann);
    }
    case ProcKind::Out:
        return out(ap(m, n->x), ap(m, n->y), ap(m, n->z));
    case ProcKind::In: {
        if (refresh) {
            Renaming m2 = m;
            m2[n->y] = names().fresh(n->y.hint);
            m2[n->z] = names().fresh(n->z.hint);
            return in_(ap(m, n->x), m2[n->y], m2[n->z], rewrite(n->body, m2, refresh));
        }
        Renaming m2 = m;
        m2.erase(n->y);
        m2.erase(n->z);
        return in_(ap(m, n->x), n->y, n->z,
                   m2.empty() ? n->body : rewrite(n->body, m2, refresh));
    }
    case ProcKind::Sel:
        return sel(ap(m, n->x), ap(m, n->z), n->label);
    case ProcKind::Bra: {
        Renaming m2 = m;
        Endpoint z = n->z;
        if (refresh) {
            z = names().fresh(n->z.hint);
            m2[n->z] = z;
        } else {
            m2.erase(n->z);
        }
        std::map<Label, ProcRef> bs;
        for (auto& [l, q] : n->branches)
            bs.emplace(l, rewrite(q, m2, refresh));
        return bra(ap(m, n->x), z, std::move(bs));
    }
    case ProcKind::Fwd:
        return fwd(ap(m, n->x), ap(m, n->y));
    case ProcKind::RecDef: {
        std::vector<Endpoint> params;
        params.reserve(n->args.size());
        for (auto& e : n->args)
            params.push_back(ap(m, e));
        return rec_def(n->var, std::move(params), rewrite(n->body, m, refresh), n->unfold_lift,
                       n->gen);
    }
    case ProcKind::RecCall: {
        std::vector<Endpoint> as;
        as.reserve(n->args.size());
        for (auto& e : n->args)
            as.push_back(ap(m, e));
        return rec_call(n->var, std::move(as));
    }
    case ProcKind::Alarm: {
        std::vector<Endpoint> as;
        as.reserve(n->args.size());
        for (auto& e : n->args)
            as.push_back(ap(m, e));
        return alarm(std::move(as));
    }
    case ProcKind::ConstP:
        return constant(ap(m, n->x), n->literal);
    }
    return n;
}

} // namespace

ProcRef subst(const ProcRef& p, const std::map<Endpoint, Endpoint>& m) {
    if (m.empty())
        return p;
    return rewrite(p, m, false);
}

ProcRef refresh_bound(const ProcRef& p) { return rewrite(p, {}, true); }

namespace {

struct AlphaState {
    std::map<std::uint64_t, int> la, lb; // endpoint binder -> canonical index
    std::map<RecVar, int> va, vb;        // recursion variable -> canonical index
    int next = 0;
    int vnext = 0;
    const std::map<Endpoint, Endpoint>* free_map = nullptr;
};

bool alpha(const ProcRef& a, const ProcRef& b, AlphaState& st);

bool alpha_ep(const Endpoint& ea, const Endpoint& eb, AlphaState& st) {
    auto ia = st.la.find(ea.id);
    auto ib = st.lb.find(eb.id);
    if ((ia == st.la.end()) != (ib == st.lb.end()))
        return false;
    if (ia != st.la.end())
        return ia->second == ib->second;
    if (st.free_map) {
        auto f = st.free_map->find(ea);
        if (f != st.free_map->end())
            return f->second == eb;
    }
    return ea == eb;
}

struct BinderScope {
    AlphaState& st;
    std::vector<std::pair<std::uint64_t, std::optional<int>>> sa, sb;
    BinderScope(AlphaState& s) : st(s) {}
    void bind(const Endpoint& ea, const Endpoint& eb) {
        sa.push_back({ea.id, st.la.count(ea.id) ? std::optional<int>{st.la[ea.id]} : std::nullopt});
        sb.push_back({eb.id, st.lb.count(eb.id) ? std::optional<int>{st.lb[eb.id]} : std::nullopt});
        st.la[ea.id] = st.next;
        st.lb[eb.id] = st.next;
        st.next++;
    }
    ~BinderScope() {
        for (auto it = sa.rbegin(); it != sa.rend(); ++it) {
            if (it->second)
                st.la[it->first] = *it->second;
            else
                st.la.erase(it->first);
        }
        for (auto it = sb.rbegin(); it != sb.rend(); ++it) {
            if (it->second)
                st.lb[it->first] = *it->second;
            else
                st.lb.erase(it->first);
        }
    }
};

bool alpha(const ProcRef& a, const ProcRef& b, AlphaState& st) {
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case ProcKind::Nil:
        return true;
    case ProcKind::Par: {
        if (a->parts.size() != b->parts.size())
            return false;
        for (size_t i = 0; i < a->parts.size(); ++i)
            if (!alpha(a->parts[i], b->parts[i], st))
                return false;
        return true;
    }
    case ProcKind::Res: {
        BinderScope sc(st);
        sc.bind(a->x, b->x);
        sc.bind(a->y, b->y);
        return alpha(a->body, b->body, st);
    }
    case ProcKind::Out:
        return alpha_ep(a->x, b->x, st) && alpha_ep(a->y, b->y, st) && alpha_ep(a->z, b->z, st);
    case ProcKind::In: {
        if (!alpha_ep(a->x, b->x, st))
            return false;
        BinderScope sc(st);
        sc.bind(a->y, b->y);
        sc.bind(a->z, b->z);
        return alpha(a->body, b->body, st);
    }
    case ProcKind::Sel:
        return a->label == b->label && alpha_ep(a->x, b->x, st) && alpha_ep(a->z, b->z, st);
    case ProcKind::Bra: {
        if (!alpha_ep(a->x, b->x, st) || a->branches.size() != b->branches.size())
            return false;
        BinderScope sc(st);
        sc.bind(a->z, b->z);
        auto it = b->branches.begin();
        for (auto& [l, p] : a->branches) {
            if (it->first != l || !alpha(p, it->second, st))
                return false;
            ++it;
        }
        return true;
    }
    case ProcKind::Fwd:
        return alpha_ep(a->x, b->x, st) && alpha_ep(a->y, b->y, st);
    case ProcKind::RecDef: {
        if (a->args.size() != b->args.size())
            return false;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (!alpha_ep(a->args[i], b->args[i], st))
                return false;
        auto sa = st.va.count(a->var) ? std::optional<int>{st.va[a->var]} : std::nullopt;
        auto sb = st.vb.count(b->var) ? std::optional<int>{st.vb[b->var]} : std::nullopt;
        st.va[a->var] = st.vnext;
        st.vb[b->var] = st.vnext;
        st.vnext++;
        bool r = alpha(a->body, b->body, st);
        if (sa)
            st.va[a->var] = *sa;
        else
            st.va.erase(a->var);
        if (sb)
            st.vb[b->var] = *sb;
        else
            st.vb.erase(b->var);
        return r;
    }
    case ProcKind::RecCall: {
        auto ia = st.va.find(a->var);
        auto ib = st.vb.find(b->var);
        if ((ia == st.va.end()) != (ib == st.vb.end()))
            return false;
        if (ia == st.va.end()) {
            if (a->var != b->var)
                return false;
        } else if (ia->second != ib->second) {
            return false;
        }
        if (a->args.size() != b->args.size())
            return false;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (!alpha_ep(a->args[i], b->args[i], st))
                return false;
        return true;
    }
    case ProcKind::Alarm: {
        if (a->args.size() != b->args.size())
            return false;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (!alpha_ep(a->args[i], b->args[i], st))
                return false;
        return true;
    }
    case ProcKind::ConstP:
        return a->literal == b->literal && alpha_ep(a->x, b->x, st);
    }
    return false;
}

} // namespace

bool alpha_equal(const ProcRef& a, const ProcRef& b) {
    AlphaState st;
    return alpha(a, b, st);
}

bool alpha_equal_mod(const ProcRef& a, const ProcRef& b,
                     const std::map<Endpoint, Endpoint>& free_map) {
    AlphaState st;
    st.free_map = &free_map;
    return alpha(a, b, st);
}

int proc_compare(const ProcRef& a, const ProcRef& b) {
    auto cmp = [](auto x, auto y) { return x < y ? -1 : (y < x ? 1 : 0); };
    if (int c = cmp(static_cast<int>(a->kind), static_cast<int>(b->kind)))
        return c;
    auto ep = [&](const Endpoint& x, const Endpoint& y) { return cmp(x.id, y.id); };
    switch (a->kind) {
    case ProcKind::Nil:
        return 0;
    case ProcKind::Par: {
        if (int c = cmp(a->parts.size(), b->parts.size()))
            return c;
        for (size_t i = 0; i < a->parts.size(); ++i)
            if (int c = proc_compare(a->parts[i], b->parts[i]))
                return c;
        return 0;
    }
    case ProcKind::Res: {
        if (int c = ep(a->x, b->x))
            return c;
        if (int c = ep(a->y, b->y))
            return c;
        return proc_compare(a->body, b->body);
    }
    case ProcKind::Out:
        if (int c = ep(a->x, b->x))
            return c;
        if (int c = ep(a->y, b->y))
            return c;
        return ep(a->z, b->z);
    case ProcKind::In: {
        if (int c = ep(a->x, b->x))
            return c;
        return proc_compare(a->body, b->body);
    }
    case ProcKind::Sel: {
        if (int c = ep(a->x, b->x))
            return c;
        if (int c = cmp(a->label, b->label))
            return c;
        return ep(a->z, b->z);
    }
    case ProcKind::Bra: {
        if (int c = ep(a->x, b->x))
            return c;
        if (int c = cmp(a->branches.size(), b->branches.size()))
            return c;
        auto it = b->branches.begin();
        for (auto& [l, p] : a->branches) {
            if (int c = cmp(l, it->first))
                return c;
            if (int c = proc_compare(p, it->second))
                return c;
            ++it;
        }
        return 0;
    }
    case ProcKind::Fwd: {
        if (int c = ep(a->x, b->x))
            return c;
        return ep(a->y, b->y);
    }
    case ProcKind::RecDef: {
        if (int c = cmp(a->var, b->var))
            return c;
        if (int c = cmp(a->args.size(), b->args.size()))
            return c;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (int c = ep(a->args[i], b->args[i]))
                return c;
        return proc_compare(a->body, b->body);
    }
    case ProcKind::RecCall:
    case ProcKind::Alarm: {
        if (int c = cmp(a->var, b->var))
            return c;
        if (int c = cmp(a->args.size(), b->args.size()))
            return c;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (int c = ep(a->args[i], b->args[i]))
                return c;
        return 0;
    }
    case ProcKind::ConstP: {
        if (int c = ep(a->x, b->x))
            return c;
        return cmp(a->literal, b->literal);
    }
    }
    return 0;
}

} // namespace rtc
