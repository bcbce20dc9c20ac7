#pragma once

#include "rtc/global.hpp"
#include "rtc/types.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rtc {

// ---------------------------------------------------------------------------
// Projection failures are ordinary values so that well-formedness reports can
// be total; they carry the offending exchange's position when known.
// ---------------------------------------------------------------------------

struct ProjectionFailure {
    enum class Reason { UndependableNonlocalChoice, MergeUndefined, NonContractive };

    Reason reason = Reason::UndependableNonlocalChoice;
    std::optional<std::pair<Participant, Participant>> pair; // relative projection
    std::optional<Participant> participant;                  // local projections
    SourceSpan span;

    std::string str() const;
};

using RelResult = std::variant<RelRef, ProjectionFailure>;
using SessionResult = std::variant<TypeRef, ProjectionFailure>;
using LocalResult = std::variant<LocalRef, ProjectionFailure>;

// ---------------------------------------------------------------------------
// Relative projection and well-formedness
// ---------------------------------------------------------------------------

// Dependency detection for an exchange that is not between exactly p and q.
// Yields skip.(projection of the least-label branch) when all branch
// projections agree, a dependency when p or q is involved, and a failure
// otherwise (undependable non-local choice).
RelResult ddep(const std::pair<Participant, Participant>& pq, const GlobalRef& g);

// G restricted to the interactions between p and q. Symmetric in (p,q).
RelResult relative_project(const GlobalRef& g, const Participant& p, const Participant& q);

struct RelWfReport {
    bool ok = true;
    // Key is the unordered pair (p,q) with p < q.
    std::map<std::pair<Participant, Participant>, RelResult> pairs;
};

RelWfReport relative_wf(const GlobalRef& g);

// True iff g is an exchange involving p but not q whose choice q must hear
// about (i.e. dependency detection does not yield a skip).
bool hdep(const Participant& q, const Participant& p, const GlobalRef& g);

// ---------------------------------------------------------------------------
// Session-type extraction
// ---------------------------------------------------------------------------

// Connective priorities come from the "@n" annotations on the message type;
// missing annotations default to 0 (the parser warns about them).
TypeRef msg_to_session(const MsgRef& m);

// Local projection of g onto p starting at priority o. Each protocol step
// advances the priority by 4 (select, output, branch, input).
SessionResult local_project(const GlobalRef& g, const Participant& p, std::uint64_t o);

// Session type of p's router endpoint towards q's router, extracted from the
// relative type describing the (p,q) protocol.
TypeRef rel_to_session(const Participant& p, const Participant& q, std::uint64_t o,
                       const RelRef& r);

// ---------------------------------------------------------------------------
// Merge-based local projection (the alternative well-formedness)
// ---------------------------------------------------------------------------

// Merge of local types: receives union (recursing on common labels), sends
// must be identical, skips merge pointwise keeping the skip.
std::optional<LocalRef> merge(const LocalRef& a, const LocalRef& b);

LocalResult merge_local_project(const GlobalRef& g, const Participant& p);

struct MergeWfReport {
    bool ok = true;
    std::map<Participant, LocalResult> participants;
};

MergeWfReport merge_wf(const GlobalRef& g);

// ---------------------------------------------------------------------------
// Global contexts: a global type with a single hole, used to reason about
// positions inside a protocol (in particular recursive definitions).
// ---------------------------------------------------------------------------

struct GlobalContext;
using CtxRef = std::shared_ptr<const GlobalContext>;

enum class CtxKind { Hole, SkipCtx, RecCtx, ExchangeCtx };

struct GlobalContext {
    CtxKind kind = CtxKind::Hole;
    CtxRef next;                          // SkipCtx/RecCtx/ExchangeCtx
    RecVar var;                           // RecCtx
    Participant sender, receiver;         // ExchangeCtx
    std::map<Label, GlobalBranch> closed; // ExchangeCtx: branches without the hole
    Label hole_label;                     // ExchangeCtx
    MsgRef hole_payload;                  // ExchangeCtx
};

CtxRef ctx_hole();
CtxRef ctx_skip(CtxRef next);
CtxRef ctx_rec(RecVar var, CtxRef next);
CtxRef ctx_exchange(Participant sender, Participant receiver, std::map<Label, GlobalBranch> closed,
                    Label hole_label, MsgRef hole_payload, CtxRef next);

// C[g]: plug g into the hole of C.
GlobalRef plug(const CtxRef& c, const GlobalRef& g);

// Recursion binders crossed on the way to the hole, outermost first.
std::vector<RecVar> ctx_binders(const CtxRef& c);

// Body of the recursive definition mu X. ... inside g (first in depth-first
// order), and the context whose hole marks that definition. Throw
// std::invalid_argument if X is not bound in g.
GlobalRef rec_def(const RecVar& x, const GlobalRef& g);
CtxRef rec_ctx(const RecVar& x, const GlobalRef& g);

// Absolute priority of the hole: +4 per exchange or skip passed.
std::uint64_t ctx_priority(const CtxRef& c);
std::uint64_t rec_priority(const RecVar& x, const GlobalRef& g);

// Unordered pairs (p < q) of participants that still interact at the given
// recursive definition / at the hole of the given context.
std::set<std::pair<Participant, Participant>> active_pairs_rec(const RecVar& x,
                                                               const GlobalRef& g);
std::set<std::pair<Participant, Participant>> active_pairs_ctx(const CtxRef& c,
                                                               const GlobalRef& g);

} // namespace rtc
