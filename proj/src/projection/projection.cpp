#include "rtc/projection.hpp"

#include <cassert>

namespace rtc {

std::string ProjectionFailure::str() const {
    std::string what;
    switch (reason) {
    case Reason::UndependableNonlocalChoice:
        what = "undependable non-local choice";
        break;
    case Reason::MergeUndefined:
        what = "merge undefined";
        break;
    case Reason::NonContractive:
        what = "non-contractive recursion";
        break;
    }
    std::string where;
    if (pair)
        where = " for (" + pair->first + "," + pair->second + ")";
    else if (participant)
        where = " for " + *participant;
    std::string at = span.known() ? " at " + span.str() : "";
    return what + where + at;
}

namespace {

// Memoizes projections per call tree; keys are node identity plus the
// projection parameters, which is sound because projection of a node does not
// depend on its surrounding context.
struct Projector {
    std::map<std::tuple<const GlobalType*, Participant, Participant>, RelResult> rel_memo;
    std::map<std::tuple<const GlobalType*, Participant, std::uint64_t>, SessionResult>
        local_memo;

    RelResult dep_detect(const std::pair<Participant, Participant>& pq, const GlobalRef& g) {
        assert(g->kind == GlobalKind::Exchange);
        const auto& [p, q] = pq;
        // Project every branch first; any failure is the exchange's failure.
        std::map<Label, RelRef> projs;
        for (auto& [l, b] : g->branches) {
            auto r = rel(b.cont, p, q);
            if (auto* f = std::get_if<ProjectionFailure>(&r))
                return *f;
            projs.emplace(l, std::get<RelRef>(r));
        }
        bool all_equal = true;
        const RelRef& first = projs.begin()->second;
        for (auto& [l, r] : projs)
            if (!rel_equal(first, r)) {
                all_equal = false;
                break;
            }
        if (all_equal)
            return r_skip(first); // least label, forced by map order
        if (p == g->sender)
            return r_dep_out(p, g->receiver, std::move(projs));
        if (q == g->sender)
            return r_dep_out(q, g->receiver, std::move(projs));
        if (p == g->receiver)
            return r_dep_in(p, g->sender, std::move(projs));
        if (q == g->receiver)
            return r_dep_in(q, g->sender, std::move(projs));
        ProjectionFailure f;
        f.reason = ProjectionFailure::Reason::UndependableNonlocalChoice;
        f.pair = pq;
        f.span = g->span;
        return f;
    }

    RelResult rel(const GlobalRef& g, const Participant& p, const Participant& q) {
        auto key = std::make_tuple(g.get(), p, q);
        if (auto it = rel_memo.find(key); it != rel_memo.end())
            return it->second;
        RelResult out = rel_uncached(g, p, q);
        rel_memo.emplace(std::move(key), out);
        return out;
    }

    RelResult rel_uncached(const GlobalRef& g, const Participant& p, const Participant& q) {
        switch (g->kind) {
        case GlobalKind::End:
            return r_end();
        case GlobalKind::Var:
            return r_var(g->var);
        case GlobalKind::Skip: {
            auto r = rel(g->cont, p, q);
            if (auto* f = std::get_if<ProjectionFailure>(&r))
                return *f;
            return r_skip(std::get<RelRef>(r));
        }
        case GlobalKind::Rec: {
            auto r = rel(g->body, p, q);
            if (auto* f = std::get_if<ProjectionFailure>(&r))
                return *f;
            auto body = std::get<RelRef>(r);
            if (contractive_relative(body, g->var))
                return r_rec(g->var, body);
            return r_end();
        }
        case GlobalKind::Exchange: {
            bool direct = (g->sender == p && g->receiver == q) ||
                          (g->sender == q && g->receiver == p);
            if (direct) {
                std::map<Label, RelBranch> bs;
                for (auto& [l, b] : g->branches) {
                    auto r = rel(b.cont, p, q);
                    if (auto* f = std::get_if<ProjectionFailure>(&r))
                        return *f;
                    bs.emplace(l, RelBranch{b.payload, std::get<RelRef>(r)});
                }
                return r_msg(g->sender, std::move(bs));
            }
            return dep_detect({p, q}, g);
        }
        }
        return r_end();
    }

    SessionResult local(const GlobalRef& g, const Participant& p, std::uint64_t o) {
        auto key = std::make_tuple(g.get(), p, o);
        if (auto it = local_memo.find(key); it != local_memo.end())
            return it->second;
        SessionResult out = local_uncached(g, p, o);
        local_memo.emplace(std::move(key), out);
        return out;
    }

    SessionResult local_uncached(const GlobalRef& g, const Participant& p, std::uint64_t o) {
        switch (g->kind) {
        case GlobalKind::End:
            return t_bullet();
        case GlobalKind::Var:
            return t_var(g->var);
        case GlobalKind::Skip:
            return local(g->cont, p, o + 4);
        case GlobalKind::Rec: {
            auto r = local(g->body, p, o);
            if (auto* f = std::get_if<ProjectionFailure>(&r))
                return *f;
            auto body = std::get<TypeRef>(r);
            if (contractive_session(body, g->var))
                return t_rec(g->var, body);
            return t_bullet();
        }
        case GlobalKind::Exchange: {
            auto conts = [&](std::uint64_t next_o)
                -> std::variant<std::map<Label, TypeRef>, ProjectionFailure> {
                std::map<Label, TypeRef> out;
                for (auto& [l, b] : g->branches) {
                    auto r = local(b.cont, p, next_o);
                    if (auto* f = std::get_if<ProjectionFailure>(&r))
                        return *f;
                    out.emplace(l, std::get<TypeRef>(r));
                }
                return out;
            };
            if (g->sender == p) {
                auto cs = conts(o + 4);
                if (auto* f = std::get_if<ProjectionFailure>(&cs))
                    return *f;
                std::map<Label, TypeRef> bs;
                for (auto& [l, b] : g->branches)
                    bs.emplace(l, t_tensor(msg_to_session(b.payload), Priority::nat(o + 1),
                                           std::get<0>(cs).at(l)));
                return t_plus(Priority::nat(o), std::move(bs));
            }
            if (g->receiver == p) {
                auto cs = conts(o + 4);
                if (auto* f = std::get_if<ProjectionFailure>(&cs))
                    return *f;
                std::map<Label, TypeRef> bs;
                for (auto& [l, b] : g->branches)
                    bs.emplace(l, t_parr(dual(msg_to_session(b.payload)), Priority::nat(o + 3),
                                         std::get<0>(cs).at(l)));
                return t_with(Priority::nat(o + 2), std::move(bs));
            }
            bool dep_s = hdep(p, g->sender, g);
            bool dep_r = !dep_s && hdep(p, g->receiver, g);
            if (dep_s || dep_r) {
                auto cs = conts(o + 4);
                if (auto* f = std::get_if<ProjectionFailure>(&cs))
                    return *f;
                return t_with(Priority::nat(o + (dep_s ? 2 : 3)), std::move(std::get<0>(cs)));
            }
            // No dependency: all branches project equally; use the least label.
            return local(g->branches.begin()->second.cont, p, o + 4);
        }
        }
        return t_bullet();
    }
};

} // namespace

RelResult ddep(const std::pair<Participant, Participant>& pq, const GlobalRef& g) {
    Projector pr;
    return pr.dep_detect(pq, g);
}

RelResult relative_project(const GlobalRef& g, const Participant& p, const Participant& q) {
    assert(p != q);
    Projector pr;
    return pr.rel(g, p, q);
}

RelWfReport relative_wf(const GlobalRef& g) {
    RelWfReport rep;
    auto parts = participants(g);
    Projector pr;
    for (auto it = parts.begin(); it != parts.end(); ++it)
        for (auto jt = std::next(it); jt != parts.end(); ++jt) {
            auto r = pr.rel(g, *it, *jt);
            if (std::holds_alternative<ProjectionFailure>(r))
                rep.ok = false;
            rep.pairs.emplace(std::make_pair(*it, *jt), std::move(r));
        }
    return rep;
}

bool hdep(const Participant& q, const Participant& p, const GlobalRef& g) {
    if (g->kind != GlobalKind::Exchange)
        return false;
    bool q_out = q != g->sender && q != g->receiver;
    bool p_in = p == g->sender || p == g->receiver;
    if (!q_out || !p_in)
        return false;
    auto d = ddep({p, q}, g);
    if (auto* r = std::get_if<RelRef>(&d))
        return (*r)->kind != RelKind::Skip;
    return true; // undefined is certainly not a skip
}

TypeRef msg_to_session(const MsgRef& m) {
    auto prio = [&](const std::optional<std::uint64_t>& a) {
        return Priority::nat(a.value_or(0));
    };
    switch (m->kind) {
    case MsgKind::End:
        return t_bullet();
    case MsgKind::Send:
        return t_tensor(msg_to_session(m->payload), prio(m->prio_ann), msg_to_session(m->cont));
    case MsgKind::Recv:
        return t_parr(msg_to_session(m->payload), prio(m->prio_ann), msg_to_session(m->cont));
    case MsgKind::Select:
    case MsgKind::Branch: {
        std::map<Label, TypeRef> bs;
        for (auto& [l, b] : m->branches)
            bs.emplace(l, msg_to_session(b));
        return m->kind == MsgKind::Select ? t_plus(prio(m->prio_ann), std::move(bs))
                                          : t_with(prio(m->prio_ann), std::move(bs));
    }
    }
    return t_bullet();
}

SessionResult local_project(const GlobalRef& g, const Participant& p, std::uint64_t o) {
    Projector pr;
    return pr.local(g, p, o);
}

TypeRef rel_to_session(const Participant& p, const Participant& q, std::uint64_t o,
                       const RelRef& r) {
    switch (r->kind) {
    case RelKind::End:
        return t_bullet();
    case RelKind::Var:
        return t_var(r->var);
    case RelKind::Rec:
        return t_rec(r->var, rel_to_session(p, q, o, r->body));
    case RelKind::Skip:
        return rel_to_session(p, q, o + 4, r->cont);
    case RelKind::Msg: {
        std::map<Label, TypeRef> bs;
        bool mine = r->who == p;
        for (auto& [l, b] : r->branches) {
            auto payload = msg_to_session(b.payload);
            auto cont = rel_to_session(p, q, o + 4, b.cont);
            bs.emplace(l, mine ? t_tensor(payload, Priority::nat(o + 2), cont)
                               : t_parr(dual(payload), Priority::nat(o + 2), cont));
        }
        return mine ? t_plus(Priority::nat(o + 1), std::move(bs))
                    : t_with(Priority::nat(o + 1), std::move(bs));
    }
    case RelKind::DepIn:
    case RelKind::DepOut: {
        std::map<Label, TypeRef> bs;
        for (auto& [l, b] : r->dep_branches)
            bs.emplace(l, rel_to_session(p, q, o + 4, b));
        std::uint64_t at = r->kind == RelKind::DepIn ? o + 2 : o + 1;
        bool mine = r->who == p;
        return mine ? t_plus(Priority::nat(at), std::move(bs))
                    : t_with(Priority::nat(at), std::move(bs));
    }
    }
    return t_bullet();
}

} // namespace rtc
