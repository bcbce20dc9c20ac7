#include "rtc/projection.hpp"

#include <stdexcept>

namespace rtc {

namespace {

std::shared_ptr<GlobalContext> cnode(CtxKind k) {
    auto n = std::make_shared<GlobalContext>();
    n->kind = k;
    return n;
}

} // namespace

CtxRef ctx_hole() { return cnode(CtxKind::Hole); }

CtxRef ctx_skip(CtxRef next) {
    auto n = cnode(CtxKind::SkipCtx);
    n->next = std::move(next);
    return n;
}

CtxRef ctx_rec(RecVar var, CtxRef next) {
    auto n = cnode(CtxKind::RecCtx);
    n->var = std::move(var);
    n->next = std::move(next);
    return n;
}

CtxRef ctx_exchange(Participant sender, Participant receiver, std::map<Label, GlobalBranch> closed,
                    Label hole_label, MsgRef hole_payload, CtxRef next) {
    auto n = cnode(CtxKind::ExchangeCtx);
    n->sender = std::move(sender);
    n->receiver = std::move(receiver);
    n->closed = std::move(closed);
    n->hole_label = std::move(hole_label);
    n->hole_payload = std::move(hole_payload);
    n->next = std::move(next);
    return n;
}

GlobalRef plug(const CtxRef& c, const GlobalRef& g) {
    switch (c->kind) {
    case CtxKind::Hole:
        return g;
    case CtxKind::SkipCtx:
        return g_skip(plug(c->next, g));
    case CtxKind::RecCtx:
        return g_rec(c->var, plug(c->next, g));
    case CtxKind::ExchangeCtx: {
        auto bs = c->closed;
        bs.emplace(c->hole_label, GlobalBranch{c->hole_payload, plug(c->next, g)});
        return g_exchange(c->sender, c->receiver, std::move(bs));
    }
    }
    return g;
}

std::vector<RecVar> ctx_binders(const CtxRef& c) {
    std::vector<RecVar> out;
    for (CtxRef h = c; h->kind != CtxKind::Hole; h = h->next)
        if (h->kind == CtxKind::RecCtx)
            out.push_back(h->var);
    return out;
}

namespace {

// Context with its hole at the (depth-first) first `mu x. ...` node of g,
// or null if x is not bound in g.
CtxRef find_rec(const RecVar& x, const GlobalRef& g) {
    switch (g->kind) {
    case GlobalKind::End:
    case GlobalKind::Var:
        return nullptr;
    case GlobalKind::Skip:
        if (auto c = find_rec(x, g->cont))
            return ctx_skip(c);
        return nullptr;
    case GlobalKind::Rec:
        if (g->var == x)
            return ctx_hole();
        if (auto c = find_rec(x, g->body))
            return ctx_rec(g->var, c);
        return nullptr;
    case GlobalKind::Exchange:
        for (auto& [l, b] : g->branches) {
            if (auto c = find_rec(x, b.cont)) {
                std::map<Label, GlobalBranch> closed;
                for (auto& [l2, b2] : g->branches)
                    if (l2 != l)
                        closed.emplace(l2, b2);
                return ctx_exchange(g->sender, g->receiver, std::move(closed), l, b.payload, c);
            }
        }
        return nullptr;
    }
    return nullptr;
}

} // namespace

GlobalRef rec_def(const RecVar& x, const GlobalRef& g) {
    auto c = find_rec(x, g);
    if (!c)
        throw std::invalid_argument("recursion variable '" + x + "' is not bound");
    // Walk down the same path and return the mu's body.
    GlobalRef h = g;
    for (CtxRef k = c; k->kind != CtxKind::Hole;) {
        switch (k->kind) {
        case CtxKind::SkipCtx:
            h = h->cont;
            break;
        case CtxKind::RecCtx:
            h = h->body;
            break;
        case CtxKind::ExchangeCtx:
            h = h->branches.at(k->hole_label).cont;
            break;
        case CtxKind::Hole:
            break;
        }
        k = k->next;
    }
    return h->body;
}

CtxRef rec_ctx(const RecVar& x, const GlobalRef& g) {
    auto c = find_rec(x, g);
    if (!c)
        throw std::invalid_argument("recursion variable '" + x + "' is not bound");
    return c;
}

std::uint64_t ctx_priority(const CtxRef& c) {
    std::uint64_t o = 0;
    for (CtxRef h = c; h->kind != CtxKind::Hole; h = h->next)
        if (h->kind == CtxKind::SkipCtx || h->kind == CtxKind::ExchangeCtx)
            o += 4;
    return o;
}

std::uint64_t rec_priority(const RecVar& x, const GlobalRef& g) {
    return ctx_priority(rec_ctx(x, g));
}

std::set<std::pair<Participant, Participant>> active_pairs_ctx(const CtxRef& c,
                                                               const GlobalRef& g) {
    auto binders = ctx_binders(c);
    if (!binders.empty())
        return active_pairs_rec(binders.back(), g);
    std::set<std::pair<Participant, Participant>> out;
    auto parts = participants(g);
    for (auto it = parts.begin(); it != parts.end(); ++it)
        for (auto jt = std::next(it); jt != parts.end(); ++jt)
            out.emplace(*it, *jt);
    return out;
}

std::set<std::pair<Participant, Participant>> active_pairs_rec(const RecVar& x,
                                                               const GlobalRef& g) {
    auto ctx = rec_ctx(x, g);
    auto candidates = active_pairs_ctx(ctx, g);
    auto def = g_rec(x, rec_def(x, g));
    std::set<std::pair<Participant, Participant>> out;
    for (auto& [p, q] : candidates) {
        auto r = relative_project(def, p, q);
        auto* t = std::get_if<RelRef>(&r);
        // Undefined projections count as active; with a relative well-formed
        // input this does not happen for bound sub-protocols.
        if (!t || (*t)->kind != RelKind::End)
            out.emplace(p, q);
    }
    return out;
}

} // namespace rtc
