#include "rtc/projection.hpp"

namespace rtc {

std::optional<LocalRef> merge(const LocalRef& a, const LocalRef& b) {
    if (a->kind != b->kind)
        return std::nullopt;
    switch (a->kind) {
    case LocalKind::End:
        return a;
    case LocalKind::Var:
        return a->var == b->var ? std::optional<LocalRef>{a} : std::nullopt;
    case LocalKind::Skip: {
        // Pointwise merge that keeps the skip, so merged projections stay
        // aligned with the steps of the global type.
        auto m = merge(a->cont, b->cont);
        if (!m)
            return std::nullopt;
        return l_skip(*m);
    }
    case LocalKind::Rec: {
        if (a->var != b->var)
            return std::nullopt;
        auto m = merge(a->body, b->body);
        if (!m)
            return std::nullopt;
        return l_rec(a->var, *m);
    }
    case LocalKind::Send:
        // Sends merge only with themselves.
        return local_equal(a, b) ? std::optional<LocalRef>{a} : std::nullopt;
    case LocalKind::Recv: {
        if (a->peer != b->peer)
            return std::nullopt;
        std::map<Label, LocalBranch> bs = a->branches;
        for (auto& [l, rb] : b->branches) {
            auto it = bs.find(l);
            if (it == bs.end()) {
                bs.emplace(l, rb);
                continue;
            }
            // Message types merge as the identity, so they must agree.
            if (!msg_equal(it->second.payload, rb.payload))
                return std::nullopt;
            auto m = merge(it->second.cont, rb.cont);
            if (!m)
                return std::nullopt;
            it->second = LocalBranch{it->second.payload, *m};
        }
        return l_recv(a->peer, std::move(bs));
    }
    }
    return std::nullopt;
}

namespace {

LocalResult merge_project(const GlobalRef& g, const Participant& p) {
    switch (g->kind) {
    case GlobalKind::End:
        return l_end();
    case GlobalKind::Var:
        return l_var(g->var);
    case GlobalKind::Skip: {
        auto r = merge_project(g->cont, p);
        if (auto* f = std::get_if<ProjectionFailure>(&r))
            return *f;
        return l_skip(std::get<LocalRef>(r));
    }
    case GlobalKind::Rec: {
        auto r = merge_project(g->body, p);
        if (auto* f = std::get_if<ProjectionFailure>(&r))
            return *f;
        auto body = std::get<LocalRef>(r);
        // mu X. G' projects to end when the body is skip*. end or skip*. X.
        const LocalType* h = body.get();
        while (h->kind == LocalKind::Skip)
            h = h->cont.get();
        if (h->kind == LocalKind::End || (h->kind == LocalKind::Var && h->var == g->var))
            return l_end();
        return l_rec(g->var, body);
    }
    case GlobalKind::Exchange: {
        if (g->sender == p || g->receiver == p) {
            std::map<Label, LocalBranch> bs;
            for (auto& [l, b] : g->branches) {
                auto r = merge_project(b.cont, p);
                if (auto* f = std::get_if<ProjectionFailure>(&r))
                    return *f;
                bs.emplace(l, LocalBranch{b.payload, std::get<LocalRef>(r)});
            }
            return g->sender == p ? l_send(g->receiver, std::move(bs))
                                  : l_recv(g->sender, std::move(bs));
        }
        std::optional<LocalRef> acc;
        for (auto& [l, b] : g->branches) {
            auto r = merge_project(b.cont, p);
            if (auto* f = std::get_if<ProjectionFailure>(&r))
                return *f;
            if (!acc) {
                acc = std::get<LocalRef>(r);
                continue;
            }
            acc = merge(*acc, std::get<LocalRef>(r));
            if (!acc) {
                ProjectionFailure f;
                f.reason = ProjectionFailure::Reason::MergeUndefined;
                f.participant = p;
                f.span = g->span;
                return f;
            }
        }
        return l_skip(*acc);
    }
    }
    return l_end();
}

} // namespace

LocalResult merge_local_project(const GlobalRef& g, const Participant& p) {
    return merge_project(g, p);
}

MergeWfReport merge_wf(const GlobalRef& g) {
    MergeWfReport rep;
    for (auto& p : participants(g)) {
        auto r = merge_local_project(g, p);
        if (std::holds_alternative<ProjectionFailure>(r))
            rep.ok = false;
        rep.participants.emplace(p, std::move(r));
    }
    return rep;
}

} // namespace rtc
