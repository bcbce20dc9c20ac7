#include "rtc/synthesis.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace rtc {

namespace {

TypeRef session_of(SessionResult r, const std::string& what) {
    if (auto* t = std::get_if<TypeRef>(&r))
        return *t;
    throw SynthesisError(what + ": " + std::get<ProjectionFailure>(r).str());
}

RelRef rel_of(RelResult r, const std::string& what) {
    if (auto* t = std::get_if<RelRef>(&r))
        return *t;
    throw SynthesisError(what + ": " + std::get<ProjectionFailure>(r).str());
}

void reject_self_exchanges(const GlobalRef& g) {
    switch (g->kind) {
    case GlobalKind::End:
    case GlobalKind::Var:
        return;
    case GlobalKind::Skip:
        reject_self_exchanges(g->cont);
        return;
    case GlobalKind::Rec:
        reject_self_exchanges(g->body);
        return;
    case GlobalKind::Exchange:
        if (g->sender == g->receiver)
            throw SynthesisError("protocol has a self-exchange at participant " + g->sender);
        for (const auto& [l, br] : g->branches)
            reject_self_exchanges(br.cont);
        return;
    }
}

void require_usable(const GlobalRef& g) {
    if (!free_global_vars(g).empty())
        throw SynthesisError("synthesis requires a closed protocol");
    reject_self_exchanges(g);
    auto wf = relative_wf(g);
    if (wf.ok)
        return;
    for (const auto& [pq, r] : wf.pairs)
        if (auto* f = std::get_if<ProjectionFailure>(&r))
            throw SynthesisError("synthesis requires a relative well-formed protocol: " +
                                 f->str());
    throw SynthesisError("synthesis requires a relative well-formed protocol");
}

std::vector<Participant> sorted_unique(std::vector<Participant> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// v(u). w![u'] . (u <-> u' || cont): receive the payload on `from`, forward it
// on `to`, and continue.
ProcRef forward_payload(const Endpoint& from, const Endpoint& to, ProcRef cont) {
    Endpoint v = names().fresh("v");
    Endpoint w = names().fresh("v'");
    return sug_in(from, v, sug_out(to, w, par(fwd(v, w), std::move(cont))));
}

// ---------------------------------------------------------------------------
// Router synthesis
// ---------------------------------------------------------------------------

struct RouterBuilder {
    const Participant& p;
    const Endpoint& impl;
    const std::map<Participant, Endpoint>& links;

    const Endpoint& link(const Participant& q) const {
        auto it = links.find(q);
        if (it == links.end())
            throw SynthesisError("router for " + p + ": the protocol involves " + q +
                                 ", which is outside the peer set");
        return it->second;
    }

    std::vector<Endpoint> params_for(const std::vector<Participant>& qs) const {
        std::vector<Endpoint> out;
        out.reserve(qs.size() + 1);
        out.push_back(impl);
        for (const auto& q : qs)
            out.push_back(link(q));
        return out;
    }

    // The lift a runtime unfolding of this loop applies to annotations: one
    // more than the highest priority among the endpoint types at the loop.
    std::uint64_t loop_lift(const GlobalRef& rec, const std::vector<Participant>& qs,
                            std::uint64_t o) const {
        std::uint64_t mx =
            max_priority(session_of(local_project(rec, p, o), "router recursion"));
        for (const auto& q : qs) {
            RelRef r = rel_of(relative_project(rec, p, q), "router recursion");
            mx = std::max(mx, max_priority(rel_to_session(p, q, o, r)));
        }
        return mx + 1;
    }

    ProcRef go(const GlobalRef& g, const std::vector<Participant>& qs, std::uint64_t o) const {
        switch (g->kind) {
        case GlobalKind::End:
            return nil();
        case GlobalKind::Skip:
            return go(g->cont, qs, o + 4);
        case GlobalKind::Var:
            return rec_call(g->var, params_for(qs));
        case GlobalKind::Rec: {
            std::vector<Participant> kept;
            for (const auto& q : qs)
                if (rel_of(relative_project(g, p, q), "router recursion")->kind != RelKind::End)
                    kept.push_back(q);
            if (kept.empty())
                return nil();
            return rec_def(g->var, params_for(kept), go(g->body, kept, o),
                           loop_lift(g, kept, o));
        }
        case GlobalKind::Exchange:
            break;
        }

        const Participant& s = g->sender;
        const Participant& r = g->receiver;

        if (p == s || p == r) {
            // p is involved: relay the label between the implementation and
            // the involved peer (plus every dependent peer), then the payload.
            const Endpoint& choice_from = p == s ? impl : link(s);
            const Endpoint& choice_to = p == s ? link(r) : impl;
            std::vector<Participant> deps;
            for (const auto& q : qs)
                if (hdep(q, p, g))
                    deps.push_back(q);
            std::map<Label, ProcRef> bs;
            for (const auto& [lab, br] : g->branches) {
                ProcRef body = forward_payload(choice_from, choice_to, go(br.cont, qs, o + 4));
                for (auto it = deps.rbegin(); it != deps.rend(); ++it)
                    body = sug_sel(link(*it), lab, std::move(body));
                bs.emplace(lab, sug_sel(choice_to, lab, std::move(body)));
            }
            return sug_bra(choice_from, std::move(bs));
        }

        bool dep_on_s = std::find(qs.begin(), qs.end(), s) != qs.end() && hdep(p, s, g);
        bool dep_on_r = std::find(qs.begin(), qs.end(), r) != qs.end() && hdep(p, r, g);

        if (dep_on_s && dep_on_r) {
            // Both sides relay the choice; a mismatch means a peer broke the
            // protocol, so every remaining endpoint is surrendered.
            std::vector<Endpoint> alarm_args = params_for(qs);
            std::map<Label, ProcRef> outer;
            for (const auto& [lab, br] : g->branches) {
                std::map<Label, ProcRef> inner;
                for (const auto& [lab2, unused] : g->branches) {
                    (void)unused;
                    inner.emplace(lab2, lab2 == lab ? go(br.cont, qs, o + 4)
                                                    : alarm(alarm_args));
                }
                outer.emplace(lab, sug_sel(impl, lab, sug_bra(link(r), std::move(inner))));
            }
            return sug_bra(link(s), std::move(outer));
        }
        if (dep_on_s || dep_on_r) {
            const Participant& from = dep_on_s ? s : r;
            std::map<Label, ProcRef> bs;
            for (const auto& [lab, br] : g->branches)
                bs.emplace(lab, sug_sel(impl, lab, go(br.cont, qs, o + 4)));
            return sug_bra(link(from), std::move(bs));
        }
        // No dependency: every branch looks the same from here; follow the
        // least label's continuation.
        return go(g->branches.begin()->second.cont, qs, o + 4);
    }
};

} // namespace

RouterSpec synthesize_router(const Participant& p, const std::vector<Participant>& peers,
                             const GlobalRef& g) {
    require_usable(g);
    RouterSpec spec;
    spec.p = p;
    spec.peers = sorted_unique(peers);
    if (std::find(spec.peers.begin(), spec.peers.end(), p) != spec.peers.end())
        throw std::invalid_argument("synthesize_router: peer list contains the participant");
    spec.impl = names().fresh("mu_" + p);
    for (const auto& q : spec.peers)
        spec.links.emplace(q, names().fresh(p + "_" + q));
    RouterBuilder b{p, spec.impl, spec.links};
    spec.process = b.go(g, spec.peers, 0);
    auto fv = free_endpoints(spec.process);
    for (const auto& q : spec.peers)
        if (!fv.count(spec.links.at(q)))
            spec.inert.push_back(q);
    return spec;
}

// ---------------------------------------------------------------------------
// Orchestrator synthesis
// ---------------------------------------------------------------------------

namespace {

struct OrchBuilder {
    const std::map<Participant, Endpoint>& ports;

    const Endpoint& port(const Participant& q) const {
        auto it = ports.find(q);
        if (it == ports.end())
            throw SynthesisError("orchestrator: the protocol involves " + q +
                                 ", which is outside the participant set");
        return it->second;
    }

    std::vector<Endpoint> params_for(const std::vector<Participant>& qs) const {
        std::vector<Endpoint> out;
        out.reserve(qs.size());
        for (const auto& q : qs)
            out.push_back(port(q));
        return out;
    }

    std::uint64_t loop_lift(const GlobalRef& rec, const std::vector<Participant>& qs,
                            std::uint64_t o) const {
        std::uint64_t mx = 0;
        for (const auto& q : qs)
            mx = std::max(
                mx, max_priority(session_of(local_project(rec, q, o), "orchestrator recursion")));
        return mx + 1;
    }

    ProcRef go(const GlobalRef& g, const std::vector<Participant>& qs, std::uint64_t o) const {
        switch (g->kind) {
        case GlobalKind::End:
            return nil();
        case GlobalKind::Skip:
            return go(g->cont, qs, o + 4);
        case GlobalKind::Var:
            return rec_call(g->var, params_for(qs));
        case GlobalKind::Rec: {
            std::vector<Participant> kept;
            for (const auto& q : qs) {
                TypeRef t = session_of(local_project(g, q, 0), "orchestrator recursion");
                if (t->kind != TypeKind::Bullet)
                    kept.push_back(q);
            }
            if (kept.empty())
                return nil();
            return rec_def(g->var, params_for(kept), go(g->body, kept, o),
                           loop_lift(g, kept, o));
        }
        case GlobalKind::Exchange:
            break;
        }

        const Participant& s = g->sender;
        const Participant& r = g->receiver;
        std::vector<Participant> deps;
        for (const auto& q : qs)
            if (hdep(q, s, g) || hdep(q, r, g))
                deps.push_back(q);
        std::map<Label, ProcRef> bs;
        for (const auto& [lab, br] : g->branches) {
            ProcRef body = forward_payload(port(s), port(r), go(br.cont, qs, o + 4));
            for (auto it = deps.rbegin(); it != deps.rend(); ++it)
                body = sug_sel(port(*it), lab, std::move(body));
            bs.emplace(lab, sug_sel(port(r), lab, std::move(body)));
        }
        return sug_bra(port(s), std::move(bs));
    }
};

} // namespace

OrchestratorSpec synthesize_orchestrator(const std::vector<Participant>& parts,
                                         const GlobalRef& g) {
    require_usable(g);
    OrchestratorSpec spec;
    spec.parts = sorted_unique(parts);
    for (const auto& q : spec.parts)
        spec.ports.emplace(q, names().fresh("mu_" + q));
    OrchBuilder b{spec.ports};
    spec.process = b.go(g, spec.parts, 0);
    return spec;
}

OrchestratorSpec synthesize_orchestrator(const GlobalRef& g) {
    auto parts = participants(g);
    return synthesize_orchestrator(std::vector<Participant>(parts.begin(), parts.end()), g);
}

// ---------------------------------------------------------------------------
// Predicted typings
// ---------------------------------------------------------------------------

TypeEnv predicted_router_typing(const RouterSpec& r, const GlobalRef& g) {
    TypeEnv env;
    env.emplace(r.impl, dual(session_of(local_project(g, r.p, 0), "router typing")));
    for (const auto& q : r.peers) {
        RelRef rel = rel_of(relative_project(g, r.p, q), "router typing");
        env.emplace(r.links.at(q), rel_to_session(r.p, q, 0, rel));
    }
    return env;
}

TypeEnv predicted_orchestrator_typing(const OrchestratorSpec& m, const GlobalRef& g) {
    TypeEnv env;
    for (const auto& q : m.parts)
        env.emplace(m.ports.at(q),
                    dual(session_of(local_project(g, q, 0), "orchestrator typing")));
    return env;
}

// ---------------------------------------------------------------------------
// Characteristic processes
// ---------------------------------------------------------------------------

namespace {

struct CharBuilder {
    ChoicePolicy policy;
    std::mt19937_64 rng;
    std::size_t script_pos = 0;
    std::size_t unrolls = 0;

    explicit CharBuilder(const ChoicePolicy& p) : policy(p), rng(p.seed) {}

    Label pick(const std::map<Label, TypeRef>& bs) {
        switch (policy.kind) {
        case ChoicePolicy::Kind::Least:
            break;
        case ChoicePolicy::Kind::Random: {
            // rng() % n rather than a distribution: bit-for-bit reproducible
            auto it = bs.begin();
            std::advance(it, static_cast<std::ptrdiff_t>(rng() % bs.size()));
            return it->first;
        }
        case ChoicePolicy::Kind::Scripted: {
            if (script_pos < policy.script.size()) {
                Label l = policy.script[script_pos++];
                if (bs.count(l))
                    return l;
            }
            break;
        }
        }
        return bs.begin()->first;
    }

    ProcRef go(const Endpoint& x, const TypeRef& a) {
        switch (a->kind) {
        case TypeKind::Bullet:
            return nil();
        case TypeKind::Var:
            return rec_call(a->var, {x});
        case TypeKind::Rec:
            // A scripted driver spends its remaining labels before settling
            // into a loop: unroll the recursion while entries are pending so
            // each one lands in a fresh iteration. The cap keeps drivers for
            // degenerate recursions (loops without choices) finite.
            if (policy.kind == ChoicePolicy::Kind::Scripted &&
                script_pos < policy.script.size() && unrolls < 4 * policy.script.size() + 8) {
                ++unrolls;
                return go(x, root_unfold(a));
            }
            return rec_def(a->var, {x}, go(x, a->body), max_priority(a->body) + 1);
        case TypeKind::Tensor: {
            Endpoint y = names().fresh(x.hint + "'");
            return sug_out(x, y, par(go(y, a->left), go(x, a->right)));
        }
        case TypeKind::Parr: {
            Endpoint y = names().fresh(x.hint + "'");
            return sug_in(x, y, par(go(y, a->left), go(x, a->right)));
        }
        case TypeKind::Plus: {
            Label j = pick(a->branches);
            return sug_sel(x, j, go(x, a->branches.at(j)));
        }
        case TypeKind::With: {
            std::map<Label, ProcRef> bs;
            for (const auto& [l, t] : a->branches)
                bs.emplace(l, go(x, t));
            return sug_bra(x, std::move(bs));
        }
        }
        return nil();
    }
};

} // namespace

ProcRef characteristic_process(const Endpoint& x, const TypeRef& a, const ChoicePolicy& policy) {
    CharBuilder b(policy);
    return b.go(x, a);
}

} // namespace rtc
