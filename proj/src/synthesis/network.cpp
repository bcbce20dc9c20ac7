#include "rtc/synthesis.hpp"

#include <algorithm>
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

// Session type of the (p,q) link pair, as carried by p's endpoint.
TypeRef link_type(const GlobalRef& g, const Participant& p, const Participant& q) {
    return rel_to_session(p, q, 0, rel_of(relative_project(g, p, q), "network wiring"));
}

// Wrap body in restrictions joining each pair of routers, outermost pair first.
ProcRef wire_router_pairs(const GlobalRef& g, const std::map<Participant, RouterSpec>& routers,
                          ProcRef body) {
    std::vector<std::pair<Participant, Participant>> pairs;
    for (auto itp = routers.begin(); itp != routers.end(); ++itp)
        for (auto itq = std::next(itp); itq != routers.end(); ++itq)
            pairs.emplace_back(itp->first, itq->first);
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
        const auto& [p, q] = *it;
        body = res(routers.at(p).links.at(q), routers.at(q).links.at(p), std::move(body),
                   link_type(g, p, q));
    }
    return body;
}

} // namespace

Hub build_hub(const GlobalRef& g) {
    Hub hub;
    auto parts = participants(g);
    for (const auto& p : parts) {
        std::vector<Participant> peers;
        for (const auto& q : parts)
            if (q != p)
                peers.push_back(q);
        hub.routers.emplace(p, synthesize_router(p, peers, g));
    }
    std::vector<ProcRef> procs;
    procs.reserve(hub.routers.size());
    for (const auto& [p, r] : hub.routers)
        procs.push_back(r.process);
    hub.process = wire_router_pairs(g, hub.routers, par(std::move(procs)));
    return hub;
}

Network build_network(const GlobalRef& g,
                      const std::vector<std::vector<Participant>>& partition,
                      const std::map<std::size_t, ImplSpec>& impls,
                      const ChoicePolicy& policy) {
    auto parts = participants(g);
    std::set<Participant> seen;
    for (const auto& block : partition) {
        if (block.empty())
            throw SynthesisError("network partition has an empty block");
        for (const auto& p : block) {
            if (!parts.count(p))
                throw SynthesisError("network partition names unknown participant " + p);
            if (!seen.insert(p).second)
                throw SynthesisError("network partition repeats participant " + p);
        }
    }
    if (seen.size() != parts.size()) {
        std::string missing;
        for (const auto& p : parts)
            if (!seen.count(p))
                missing += (missing.empty() ? "" : ", ") + p;
        throw SynthesisError("network partition is incomplete: missing " + missing);
    }
    for (const auto& [idx, spec] : impls) {
        if (idx >= partition.size())
            throw SynthesisError("implementation supplied for nonexistent block");
        if (!spec.build)
            throw SynthesisError("implementation spec has no builder");
    }

    Network net;
    for (const auto& p : parts) {
        std::vector<Participant> peers;
        for (const auto& q : parts)
            if (q != p)
                peers.push_back(q);
        net.routers.emplace(p, synthesize_router(p, peers, g));
    }

    std::vector<ProcRef> block_procs;
    for (std::size_t k = 0; k < partition.size(); ++k) {
        NetworkBlock nb;
        nb.block = partition[k];
        std::sort(nb.block.begin(), nb.block.end());

        TypeEnv env;
        for (const auto& p : nb.block) {
            Endpoint port = names().fresh(p + "_mu");
            nb.ports.emplace(p, port);
            env.emplace(port, session_of(local_project(g, p, 0), "network typing"));
        }

        const ImplSpec* spec = nullptr;
        if (auto it = impls.find(k); it != impls.end())
            spec = &it->second;

        if (spec) {
            nb.impl = spec->build(nb.ports);
            TypeEnv full = env;
            for (const auto& [v, w, a] : spec->extra) {
                full.emplace(v, a);
                full.emplace(w, dual(a));
            }
            CheckOptions opts;
            opts.allow_alarm = false;
            if (auto errv = typecheck(nb.impl, {}, full, opts)) {
                std::string who;
                for (const auto& p : nb.block)
                    who += (who.empty() ? "" : ",") + p;
                throw SynthesisError("implementation for {" + who +
                                     "} is ill-typed: " + errv->str());
            }
        } else {
            ChoicePolicy salted = policy;
            if (salted.kind == ChoicePolicy::Kind::Random)
                salted.seed = policy.seed + 0x9e3779b97f4a7c15ull * (k + 1);
            std::vector<ProcRef> ps;
            for (const auto& p : nb.block)
                ps.push_back(characteristic_process(nb.ports.at(p), env.at(nb.ports.at(p)),
                                                    salted));
            nb.impl = par(std::move(ps));
            nb.characteristic = true;
        }

        std::vector<ProcRef> ps{nb.impl};
        for (const auto& p : nb.block)
            ps.push_back(net.routers.at(p).process);
        ProcRef block_proc = par(std::move(ps));
        if (spec)
            for (auto it = spec->extra.rbegin(); it != spec->extra.rend(); ++it)
                block_proc = res(std::get<0>(*it), std::get<1>(*it), std::move(block_proc),
                                 std::get<2>(*it));
        for (auto it = nb.block.rbegin(); it != nb.block.rend(); ++it)
            block_proc = res(nb.ports.at(*it), net.routers.at(*it).impl, std::move(block_proc),
                             env.at(nb.ports.at(*it)));
        block_procs.push_back(std::move(block_proc));
        net.blocks.push_back(std::move(nb));
    }

    net.process = wire_router_pairs(g, net.routers, par(std::move(block_procs)));
    return net;
}

} // namespace rtc
