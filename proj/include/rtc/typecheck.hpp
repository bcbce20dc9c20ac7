#pragma once

#include "rtc/process.hpp"
#include "rtc/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rtc {

// ---------------------------------------------------------------------------
// Priority-typed checking for APCP processes.
//
// The checker is algorithmic: parallel splits are driven by the free
// endpoints of the components, endpoints that a subterm never uses are
// discharged when (and only when) their type is bullet-equivalent, and the
// lift at a recursive definition is computed as max priority + 1 rather than
// searched. Types are compared up to unfolding of recursion.
// ---------------------------------------------------------------------------

// Linear typing context: endpoint -> session type. Every assignment must be
// consumed exactly once by the process under check.
using TypeEnv = std::map<Endpoint, TypeRef>;

// Recursion context: recursion variable -> tuple of type *bodies* (one per
// loop parameter, in parameter order; the variable of each body is the
// recursion variable itself). May be used zero or more times.
using RecEnv = std::map<RecVar, std::vector<TypeRef>>;

struct CheckOptions {
    // Alarm processes are legal only inside synthesized routers; checking a
    // participant implementation should set this to false.
    bool allow_alarm = true;
};

struct DerivationStats {
    std::map<std::string, std::size_t> rule_counts;
    std::uint64_t max_priority = 0; // largest finite priority consumed
    // Cut type of every restriction crossed, keyed by the id of its first
    // endpoint (annotated or inferred). The runtime uses this to keep the
    // annotations of an executing term complete.
    std::map<std::uint64_t, TypeRef> cut_types;
};

struct TypeError {
    std::string rule;   // typing rule that failed ("Parr", "Rec", "Cycle", ...)
    std::string reason; // machine-readable code, e.g. "priority-violation"
    std::string detail; // human-readable, includes rendered types
    std::optional<Endpoint> endpoint;
    std::optional<RecVar> var;
    std::optional<Priority> o;  // priority of the offending prefix
    std::optional<Priority> pr; // pr(rest of the context) it had to stay below
    SourceSpan span;

    std::string str() const;
};

// nullopt = well-typed.
using CheckResult = std::optional<TypeError>;

CheckResult typecheck(const ProcRef& p, const RecEnv& omega, const TypeEnv& gamma,
                      const CheckOptions& opts = {}, DerivationStats* stats = nullptr);

CheckResult typecheck_closed(const ProcRef& p, const CheckOptions& opts = {},
                             DerivationStats* stats = nullptr);

// Side condition of a restriction: b must be the dual of a (up to unfolding).
CheckResult check_cut(const TypeRef& a, const TypeRef& b);

// lift(t, .) applied to every type of the environment.
TypeEnv lift_env(const TypeEnv& gamma, std::uint64_t t);

// pr(Gamma): least priority among the types of gamma; omega when none is finite.
Priority env_priority(const TypeEnv& gamma);

// True iff a denotes the unit type (no connective in its unfolding, no free
// variable): such endpoints may be silently discharged.
bool bullet_equivalent(const TypeRef& a);

} // namespace rtc
