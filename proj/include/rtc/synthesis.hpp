#pragma once

#include "rtc/global.hpp"
#include "rtc/process.hpp"
#include "rtc/projection.hpp"
#include "rtc/typecheck.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace rtc {

// ---------------------------------------------------------------------------
// Synthesis of routers and orchestrators from a global type, characteristic
// processes for session types, and wiring of closed networks.
// ---------------------------------------------------------------------------

struct SynthesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// How a generated implementation picks the label of an internal choice.
struct ChoicePolicy {
    enum class Kind { Least, Random, Scripted };

    Kind kind = Kind::Least;
    std::uint64_t seed = 0;     // Random: deterministic per seed
    std::vector<Label> script;  // Scripted: consumed left to right; entries
                                // that do not name a branch, and picks past
                                // the end of the script, fall back to the
                                // least label

    static ChoicePolicy least() { return {}; }
    static ChoicePolicy random(std::uint64_t seed) {
        ChoicePolicy p;
        p.kind = Kind::Random;
        p.seed = seed;
        return p;
    }
    static ChoicePolicy scripted(std::vector<Label> script) {
        ChoicePolicy p;
        p.kind = Kind::Scripted;
        p.script = std::move(script);
        return p;
    }
};

// A synthesized router for participant p.
struct RouterSpec {
    Participant p;
    std::vector<Participant> peers;        // sorted, without p
    Endpoint impl;                         // endpoint toward p's implementation
    std::map<Participant, Endpoint> links; // endpoint toward each peer's router
    // Peers whose link endpoint never occurs in the process: the protocol
    // relates p with them only trivially (or a recursive loop trimmed them),
    // so their endpoints carry the unit type and must stay inert.
    std::vector<Participant> inert;
    ProcRef process;
};

// Routers relay between the implementation and the peer routers following g.
// Throws SynthesisError when g is open or not relative well-formed, and
// std::invalid_argument on malformed peer lists.
RouterSpec synthesize_router(const Participant& p, const std::vector<Participant>& peers,
                             const GlobalRef& g);

// The centralized variant: one process mediating between all implementations.
struct OrchestratorSpec {
    std::vector<Participant> parts;        // sorted
    std::map<Participant, Endpoint> ports; // endpoint toward each implementation
    ProcRef process;
};

OrchestratorSpec synthesize_orchestrator(const std::vector<Participant>& parts,
                                         const GlobalRef& g);
OrchestratorSpec synthesize_orchestrator(const GlobalRef& g); // all participants

// The typing each synthesized term is expected to satisfy (the checker
// verifies these; they are duals/extractions of the projected types).
TypeEnv predicted_router_typing(const RouterSpec& r, const GlobalRef& g);
TypeEnv predicted_orchestrator_typing(const OrchestratorSpec& m, const GlobalRef& g);

// Canonical implementation of the single endpoint x at type a: outputs fresh
// payload endpoints (implemented canonically in parallel), follows every
// branch of external choices, and resolves internal choices via the policy.
ProcRef characteristic_process(const Endpoint& x, const TypeRef& a,
                               const ChoicePolicy& policy = {});

// All routers for g wired pairwise. The free endpoints of the process are
// exactly the routers' impl ports.
struct Hub {
    std::map<Participant, RouterSpec> routers;
    ProcRef process;
};

Hub build_hub(const GlobalRef& g);

// An implementation supplied for one partition block (covering one or more
// participants, interleaved in a single process).
struct ImplSpec {
    // Receives the implementation-side endpoint for every participant of the
    // block; returns the implementation process.
    std::function<ProcRef(const std::map<Participant, Endpoint>&)> build;
    // Private channels of the implementation, closed around the block when the
    // network is assembled: (v, w, type of v); w gets the dual type.
    std::vector<std::tuple<Endpoint, Endpoint, TypeRef>> extra;
};

struct NetworkBlock {
    std::vector<Participant> block;        // sorted
    std::map<Participant, Endpoint> ports; // implementation-side endpoints
    ProcRef impl;
    bool characteristic = false; // impl was generated, not supplied
};

struct Network {
    std::map<Participant, RouterSpec> routers;
    std::vector<NetworkBlock> blocks;
    ProcRef process; // closed
};

// Build the closed network for g under the given partition of participants.
// Supplied implementations (keyed by block index) are typechecked against the
// projected types before wiring (alarms are not allowed in them); missing
// blocks are filled with characteristic processes, whose random seeds are
// salted with the block index so distinct blocks explore distinct branches.
// Throws SynthesisError on an incomplete partition or ill-typed impl.
Network build_network(const GlobalRef& g,
                      const std::vector<std::vector<Participant>>& partition,
                      const std::map<std::size_t, ImplSpec>& impls = {},
                      const ChoicePolicy& policy = {});

} // namespace rtc
