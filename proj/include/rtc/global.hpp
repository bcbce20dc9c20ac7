#pragma once

#include "rtc/common.hpp"
#include "rtc/types.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>

namespace rtc {

// ---------------------------------------------------------------------------
// Message types S, T ::= !T.S | ?T.S | +{i: S} | &{i: S} | end
// Non-recursive. Basic payload types (unit, bool, int, str, and products of
// them) are sugar for `end`; the surface spelling is kept for rendering.
// Each connective may carry an explicit priority annotation ("@n" in the
// surface syntax) consumed by session-type extraction.
// ---------------------------------------------------------------------------

struct MessageType;
using MsgRef = std::shared_ptr<const MessageType>;

enum class MsgKind { End, Send, Recv, Select, Branch };

struct MessageType {
    MsgKind kind = MsgKind::End;
    std::string surface;                   // End only: surface spelling, may be empty
    MsgRef payload, cont;                  // Send/Recv
    std::map<Label, MsgRef> branches;      // Select/Branch
    std::optional<std::uint64_t> prio_ann; // connectives only
};

MsgRef m_end(std::string surface = "");
MsgRef m_send(MsgRef payload, MsgRef cont, std::optional<std::uint64_t> ann = {});
MsgRef m_recv(MsgRef payload, MsgRef cont, std::optional<std::uint64_t> ann = {});
MsgRef m_select(std::map<Label, MsgRef> branches, std::optional<std::uint64_t> ann = {});
MsgRef m_branch(std::map<Label, MsgRef> branches, std::optional<std::uint64_t> ann = {});

bool msg_equal(const MsgRef& a, const MsgRef& b); // annotations and surface ignored

// ---------------------------------------------------------------------------
// Global types G ::= p->q{ i<S>. G } | mu X. G | X | skip. G | end
// ---------------------------------------------------------------------------

struct GlobalType;
using GlobalRef = std::shared_ptr<const GlobalType>;

enum class GlobalKind { End, Skip, Var, Rec, Exchange };

struct GlobalBranch {
    MsgRef payload;
    GlobalRef cont;
};

struct GlobalType {
    GlobalKind kind = GlobalKind::End;
    GlobalRef cont;                        // Skip
    RecVar var;                            // Var/Rec
    GlobalRef body;                        // Rec
    Participant sender, receiver;          // Exchange
    std::map<Label, GlobalBranch> branches;
    SourceSpan span;
};

GlobalRef g_end();
GlobalRef g_skip(GlobalRef cont);
GlobalRef g_var(RecVar x);
GlobalRef g_rec(RecVar x, GlobalRef body);
GlobalRef g_exchange(Participant s, Participant r, std::map<Label, GlobalBranch> branches,
                     SourceSpan span = {});
// Single-branch exchange p -> q : l<S>. G
GlobalRef g_msg(Participant s, Participant r, Label l, MsgRef payload, GlobalRef cont, SourceSpan span = {});

std::set<Participant> participants(const GlobalRef& g);
std::set<RecVar> free_global_vars(const GlobalRef& g);

// One-step unfolding mu X. G -> G{ mu X. G / X }, capture-avoiding. Pre: Rec.
GlobalRef unfold_global(const GlobalRef& g);

GlobalRef subst_global(const GlobalRef& g, const RecVar& x, const GlobalRef& image);

bool global_equal(const GlobalRef& a, const GlobalRef& b);

// ---------------------------------------------------------------------------
// Relative types R ::= s{ i<S>. R } | p?r{ i. R } | p!r{ i. R }
//                    | mu X. R | X | skip. R | end
// Msg: `who` is the sender of a direct exchange within the pair.
// DepIn  who?other{..}: `who` hears the choice from third party `other`.
// DepOut who!other{..}: `who` forwarded its own choice to third party `other`.
// ---------------------------------------------------------------------------

struct RelativeType;
using RelRef = std::shared_ptr<const RelativeType>;

enum class RelKind { End, Skip, Var, Rec, Msg, DepIn, DepOut };

struct RelBranch {
    MsgRef payload;
    RelRef cont;
};

struct RelativeType {
    RelKind kind = RelKind::End;
    RelRef cont;                          // Skip
    RecVar var;                           // Var/Rec
    RelRef body;                          // Rec
    Participant who, other;               // Msg (who = sender, other unused) / deps
    std::map<Label, RelBranch> branches;  // Msg
    std::map<Label, RelRef> dep_branches; // DepIn/DepOut
};

RelRef r_end();
RelRef r_skip(RelRef cont);
RelRef r_var(RecVar x);
RelRef r_rec(RecVar x, RelRef body);
RelRef r_msg(Participant sender, std::map<Label, RelBranch> branches);
RelRef r_dep_in(Participant who, Participant from, std::map<Label, RelRef> branches);
RelRef r_dep_out(Participant who, Participant to, std::map<Label, RelRef> branches);

std::set<Participant> rel_participants(const RelRef& r);
bool rel_equal(const RelRef& a, const RelRef& b);

// R is contractive on X iff it contains an exchange or dependency, or ends in
// a variable other than X (i.e. R is not of the form skip*. end / skip*. X).
bool contractive_relative(const RelRef& r, const RecVar& x);

// ---------------------------------------------------------------------------
// Local types (merge-based projection, used for the alternative
// well-formedness check) L ::= ?p{ i<S>. L } | !p{ i<S>. L } | mu X. L | X
//                            | skip. L | end
// ---------------------------------------------------------------------------

struct LocalType;
using LocalRef = std::shared_ptr<const LocalType>;

enum class LocalKind { End, Skip, Var, Rec, Send, Recv };

struct LocalBranch {
    MsgRef payload;
    LocalRef cont;
};

struct LocalType {
    LocalKind kind = LocalKind::End;
    LocalRef cont;                        // Skip
    RecVar var;                           // Var/Rec
    LocalRef body;                        // Rec
    Participant peer;                     // Send: to; Recv: from
    std::map<Label, LocalBranch> branches;
};

LocalRef l_end();
LocalRef l_skip(LocalRef cont);
LocalRef l_var(RecVar x);
LocalRef l_rec(RecVar x, LocalRef body);
LocalRef l_send(Participant to, std::map<Label, LocalBranch> branches);
LocalRef l_recv(Participant from, std::map<Label, LocalBranch> branches);

bool local_equal(const LocalRef& a, const LocalRef& b);

} // namespace rtc
