#include "rtc/global.hpp"

#include <atomic>
#include <cassert>
#include <functional>

namespace rtc {

namespace {

std::shared_ptr<MessageType> mnode(MsgKind k) {
    auto n = std::make_shared<MessageType>();
    n->kind = k;
    return n;
}

std::shared_ptr<GlobalType> gnode(GlobalKind k) {
    auto n = std::make_shared<GlobalType>();
    n->kind = k;
    return n;
}

std::shared_ptr<RelativeType> rnode(RelKind k) {
    auto n = std::make_shared<RelativeType>();
    n->kind = k;
    return n;
}

std::shared_ptr<LocalType> lnode(LocalKind k) {
    auto n = std::make_shared<LocalType>();
    n->kind = k;
    return n;
}

RecVar fresh_global_var(const RecVar& base) {
    static std::atomic<std::uint64_t> ctr{0};
    return base + "'" + std::to_string(ctr.fetch_add(1) + 1);
}

} // namespace

MsgRef m_end(std::string surface) {
    auto n = mnode(MsgKind::End);
    n->surface = std::move(surface);
    return n;
}

MsgRef m_send(MsgRef payload, MsgRef cont, std::optional<std::uint64_t> ann) {
    auto n = mnode(MsgKind::Send);
    n->payload = std::move(payload);
    n->cont = std::move(cont);
    n->prio_ann = ann;
    return n;
}

MsgRef m_recv(MsgRef payload, MsgRef cont, std::optional<std::uint64_t> ann) {
    auto n = mnode(MsgKind::Recv);
    n->payload = std::move(payload);
    n->cont = std::move(cont);
    n->prio_ann = ann;
    return n;
}

MsgRef m_select(std::map<Label, MsgRef> branches, std::optional<std::uint64_t> ann) {
    assert(!branches.empty());
    auto n = mnode(MsgKind::Select);
    n->branches = std::move(branches);
    n->prio_ann = ann;
    return n;
}

MsgRef m_branch(std::map<Label, MsgRef> branches, std::optional<std::uint64_t> ann) {
    assert(!branches.empty());
    auto n = mnode(MsgKind::Branch);
    n->branches = std::move(branches);
    n->prio_ann = ann;
    return n;
}

bool msg_equal(const MsgRef& a, const MsgRef& b) {
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case MsgKind::End:
        return true;
    case MsgKind::Send:
    case MsgKind::Recv:
        return msg_equal(a->payload, b->payload) && msg_equal(a->cont, b->cont);
    case MsgKind::Select:
    case MsgKind::Branch: {
        if (a->branches.size() != b->branches.size())
            return false;
        auto it = b->branches.begin();
        for (auto& [l, t] : a->branches) {
            if (it->first != l || !msg_equal(t, it->second))
                return false;
            ++it;
        }
        return true;
    }
    }
    return false;
}

GlobalRef g_end() {
    static GlobalRef e = gnode(GlobalKind::End);
    return e;
}

GlobalRef g_skip(GlobalRef cont) {
    auto n = gnode(GlobalKind::Skip);
    n->cont = std::move(cont);
    return n;
}

GlobalRef g_var(RecVar x) {
    auto n = gnode(GlobalKind::Var);
    n->var = std::move(x);
    return n;
}

GlobalRef g_rec(RecVar x, GlobalRef body) {
    auto n = gnode(GlobalKind::Rec);
    n->var = std::move(x);
    n->body = std::move(body);
    return n;
}

GlobalRef g_exchange(Participant s, Participant r, std::map<Label, GlobalBranch> branches,
                     SourceSpan span) {
    assert(s != r);
    assert(!branches.empty());
    auto n = gnode(GlobalKind::Exchange);
    n->sender = std::move(s);
    n->receiver = std::move(r);
    n->branches = std::move(branches);
    n->span = std::move(span);
    return n;
}

GlobalRef g_msg(Participant s, Participant r, Label l, MsgRef payload, GlobalRef cont,
                SourceSpan span) {
    std::map<Label, GlobalBranch> bs;
    bs.emplace(std::move(l), GlobalBranch{std::move(payload), std::move(cont)});
    return g_exchange(std::move(s), std::move(r), std::move(bs), std::move(span));
}

std::set<Participant> participants(const GlobalRef& g) {
    std::set<Participant> out;
    std::function<void(const GlobalRef&)> go = [&](const GlobalRef& n) {
        switch (n->kind) {
        case GlobalKind::End:
        case GlobalKind::Var:
            return;
        case GlobalKind::Skip:
            go(n->cont);
            return;
        case GlobalKind::Rec:
            go(n->body);
            return;
        case GlobalKind::Exchange:
            out.insert(n->sender);
            out.insert(n->receiver);
            for (auto& [l, b] : n->branches)
                go(b.cont);
            return;
        }
    };
    go(g);
    return out;
}

std::set<RecVar> free_global_vars(const GlobalRef& g) {
    std::set<RecVar> out;
    std::function<void(const GlobalRef&, std::set<RecVar>&)> go = [&](const GlobalRef& n,
                                                                     std::set<RecVar>& bound) {
        switch (n->kind) {
        case GlobalKind::End:
            return;
        case GlobalKind::Var:
            if (!bound.count(n->var))
                out.insert(n->var);
            return;
        case GlobalKind::Skip:
            go(n->cont, bound);
            return;
        case GlobalKind::Rec: {
            bool fresh = bound.insert(n->var).second;
            go(n->body, bound);
            if (fresh)
                bound.erase(n->var);
            return;
        }
        case GlobalKind::Exchange:
            for (auto& [l, b] : n->branches)
                go(b.cont, bound);
            return;
        }
    };
    std::set<RecVar> bound;
    go(g, bound);
    return out;
}

GlobalRef subst_global(const GlobalRef& g, const RecVar& x, const GlobalRef& image) {
    switch (g->kind) {
    case GlobalKind::End:
        return g;
    case GlobalKind::Var:
        return g->var == x ? image : g;
    case GlobalKind::Skip:
        return g_skip(subst_global(g->cont, x, image));
    case GlobalKind::Rec: {
        if (g->var == x)
            return g; // shadowed
        if (free_global_vars(image).count(g->var)) {
            RecVar nv = fresh_global_var(g->var);
            GlobalRef body = subst_global(g->body, g->var, g_var(nv));
            return g_rec(nv, subst_global(body, x, image));
        }
        return g_rec(g->var, subst_global(g->body, x, image));
    }
    case GlobalKind::Exchange: {
        std::map<Label, GlobalBranch> bs;
        for (auto& [l, b] : g->branches)
            bs.emplace(l, GlobalBranch{b.payload, subst_global(b.cont, x, image)});
        return g_exchange(g->sender, g->receiver, std::move(bs), g->span);
    }
    }
    return g;
}

GlobalRef unfold_global(const GlobalRef& g) {
    if (g->kind != GlobalKind::Rec)
        throw std::invalid_argument("unfold_global: type is not recursive");
    return subst_global(g->body, g->var, g);
}

namespace {

bool global_eq(const GlobalRef& a, const GlobalRef& b, std::map<RecVar, int>& ba,
               std::map<RecVar, int>& bb, int depth) {
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case GlobalKind::End:
        return true;
    case GlobalKind::Var: {
        auto ia = ba.find(a->var);
        auto ib = bb.find(b->var);
        if ((ia == ba.end()) != (ib == bb.end()))
            return false;
        if (ia == ba.end())
            return a->var == b->var;
        return ia->second == ib->second;
    }
    case GlobalKind::Skip:
        return global_eq(a->cont, b->cont, ba, bb, depth);
    case GlobalKind::Rec: {
        auto sa = ba.count(a->var) ? std::optional<int>{ba[a->var]} : std::nullopt;
        auto sb = bb.count(b->var) ? std::optional<int>{bb[b->var]} : std::nullopt;
        ba[a->var] = depth;
        bb[b->var] = depth;
        bool r = global_eq(a->body, b->body, ba, bb, depth + 1);
        if (sa)
            ba[a->var] = *sa;
        else
            ba.erase(a->var);
        if (sb)
            bb[b->var] = *sb;
        else
            bb.erase(b->var);
        return r;
    }
    case GlobalKind::Exchange: {
        if (a->sender != b->sender || a->receiver != b->receiver ||
            a->branches.size() != b->branches.size())
            return false;
        auto it = b->branches.begin();
        for (auto& [l, br] : a->branches) {
            if (it->first != l || !msg_equal(br.payload, it->second.payload) ||
                !global_eq(br.cont, it->second.cont, ba, bb, depth))
                return false;
            ++it;
        }
        return true;
    }
    }
    return false;
}

} // namespace

bool global_equal(const GlobalRef& a, const GlobalRef& b) {
    std::map<RecVar, int> ba, bb;
    return global_eq(a, b, ba, bb, 0);
}

RelRef r_end() {
    static RelRef e = rnode(RelKind::End);
    return e;
}

RelRef r_skip(RelRef cont) {
    auto n = rnode(RelKind::Skip);
    n->cont = std::move(cont);
    return n;
}

RelRef r_var(RecVar x) {
    auto n = rnode(RelKind::Var);
    n->var = std::move(x);
    return n;
}

RelRef r_rec(RecVar x, RelRef body) {
    auto n = rnode(RelKind::Rec);
    n->var = std::move(x);
    n->body = std::move(body);
    return n;
}

RelRef r_msg(Participant sender, std::map<Label, RelBranch> branches) {
    assert(!branches.empty());
    auto n = rnode(RelKind::Msg);
    n->who = std::move(sender);
    n->branches = std::move(branches);
    return n;
}

RelRef r_dep_in(Participant who, Participant from, std::map<Label, RelRef> branches) {
    assert(!branches.empty());
    auto n = rnode(RelKind::DepIn);
    n->who = std::move(who);
    n->other = std::move(from);
    n->dep_branches = std::move(branches);
    return n;
}

RelRef r_dep_out(Participant who, Participant to, std::map<Label, RelRef> branches) {
    assert(!branches.empty());
    auto n = rnode(RelKind::DepOut);
    n->who = std::move(who);
    n->other = std::move(to);
    n->dep_branches = std::move(branches);
    return n;
}

std::set<Participant> rel_participants(const RelRef& r) {
    std::set<Participant> out;
    std::function<void(const RelRef&)> go = [&](const RelRef& n) {
        switch (n->kind) {
        case RelKind::End:
        case RelKind::Var:
            return;
        case RelKind::Skip:
            go(n->cont);
            return;
        case RelKind::Rec:
            go(n->body);
            return;
        case RelKind::Msg:
            out.insert(n->who);
            for (auto& [l, b] : n->branches)
                go(b.cont);
            return;
        case RelKind::DepIn:
        case RelKind::DepOut:
            out.insert(n->who);
            for (auto& [l, b] : n->dep_branches)
                go(b);
            return;
        }
    };
    go(r);
    return out;
}

namespace {

bool rel_eq(const RelRef& a, const RelRef& b, std::map<RecVar, int>& ba, std::map<RecVar, int>& bb,
            int depth) {
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case RelKind::End:
        return true;
    case RelKind::Var: {
        auto ia = ba.find(a->var);
        auto ib = bb.find(b->var);
        if ((ia == ba.end()) != (ib == bb.end()))
            return false;
        if (ia == ba.end())
            return a->var == b->var;
        return ia->second == ib->second;
    }
    case RelKind::Skip:
        return rel_eq(a->cont, b->cont, ba, bb, depth);
    case RelKind::Rec: {
        auto sa = ba.count(a->var) ? std::optional<int>{ba[a->var]} : std::nullopt;
        auto sb = bb.count(b->var) ? std::optional<int>{bb[b->var]} : std::nullopt;
        ba[a->var] = depth;
        bb[b->var] = depth;
        bool r = rel_eq(a->body, b->body, ba, bb, depth + 1);
        if (sa)
            ba[a->var] = *sa;
        else
            ba.erase(a->var);
        if (sb)
            bb[b->var] = *sb;
        else
            bb.erase(b->var);
        return r;
    }
    case RelKind::Msg: {
        if (a->who != b->who || a->branches.size() != b->branches.size())
            return false;
        auto it = b->branches.begin();
        for (auto& [l, br] : a->branches) {
            if (it->first != l || !msg_equal(br.payload, it->second.payload) ||
                !rel_eq(br.cont, it->second.cont, ba, bb, depth))
                return false;
            ++it;
        }
        return true;
    }
    case RelKind::DepIn:
    case RelKind::DepOut: {
        if (a->who != b->who || a->other != b->other ||
            a->dep_branches.size() != b->dep_branches.size())
            return false;
        auto it = b->dep_branches.begin();
        for (auto& [l, br] : a->dep_branches) {
            if (it->first != l || !rel_eq(br, it->second, ba, bb, depth))
                return false;
            ++it;
        }
        return true;
    }
    }
    return false;
}

} // namespace

bool rel_equal(const RelRef& a, const RelRef& b) {
    std::map<RecVar, int> ba, bb;
    return rel_eq(a, b, ba, bb, 0);
}

namespace {

bool contains_rel_exchange(const RelRef& r) {
    switch (r->kind) {
    case RelKind::End:
    case RelKind::Var:
        return false;
    case RelKind::Skip:
        return contains_rel_exchange(r->cont);
    case RelKind::Rec:
        return contains_rel_exchange(r->body);
    default:
        return true;
    }
}

} // namespace

bool contractive_relative(const RelRef& r, const RecVar& x) {
    switch (r->kind) {
    case RelKind::End:
        return false;
    case RelKind::Var:
        return r->var != x;
    case RelKind::Skip:
        return contractive_relative(r->cont, x);
    case RelKind::Rec:
        return r->var == x ? contains_rel_exchange(r->body) : contractive_relative(r->body, x);
    default:
        return true;
    }
}

LocalRef l_end() {
    static LocalRef e = lnode(LocalKind::End);
    return e;
}

LocalRef l_skip(LocalRef cont) {
    auto n = lnode(LocalKind::Skip);
    n->cont = std::move(cont);
    return n;
}

LocalRef l_var(RecVar x) {
    auto n = lnode(LocalKind::Var);
    n->var = std::move(x);
    return n;
}

LocalRef l_rec(RecVar x, LocalRef body) {
    auto n = lnode(LocalKind::Rec);
    n->var = std::move(x);
    n->body = std::move(body);
    return n;
}

LocalRef l_send(Participant to, std::map<Label, LocalBranch> branches) {
    assert(!branches.empty());
    auto n = lnode(LocalKind::Send);
    n->peer = std::move(to);
    n->branches = std::move(branches);
    return n;
}

LocalRef l_recv(Participant from, std::map<Label, LocalBranch> branches) {
    assert(!branches.empty());
    auto n = lnode(LocalKind::Recv);
    n->peer = std::move(from);
    n->branches = std::move(branches);
    return n;
}

namespace {

bool local_eq(const LocalRef& a, const LocalRef& b, std::map<RecVar, int>& ba,
              std::map<RecVar, int>& bb, int depth) {
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case LocalKind::End:
        return true;
    case LocalKind::Var: {
        auto ia = ba.find(a->var);
        auto ib = bb.find(b->var);
        if ((ia == ba.end()) != (ib == bb.end()))
            return false;
        if (ia == ba.end())
            return a->var == b->var;
        return ia->second == ib->second;
    }
    case LocalKind::Skip:
        return local_eq(a->cont, b->cont, ba, bb, depth);
    case LocalKind::Rec: {
        auto sa = ba.count(a->var) ? std::optional<int>{ba[a->var]} : std::nullopt;
        auto sb = bb.count(b->var) ? std::optional<int>{bb[b->var]} : std::nullopt;
        ba[a->var] = depth;
        bb[b->var] = depth;
        bool r = local_eq(a->body, b->body, ba, bb, depth + 1);
        if (sa)
            ba[a->var] = *sa;
        else
            ba.erase(a->var);
        if (sb)
            bb[b->var] = *sb;
        else
            bb.erase(b->var);
        return r;
    }
    case LocalKind::Send:
    case LocalKind::Recv: {
        if (a->peer != b->peer || a->branches.size() != b->branches.size())
            return false;
        auto it = b->branches.begin();
        for (auto& [l, br] : a->branches) {
            if (it->first != l || !msg_equal(br.payload, it->second.payload) ||
                !local_eq(br.cont, it->second.cont, ba, bb, depth))
                return false;
            ++it;
        }
        return true;
    }
    }
    return false;
}

} // namespace

bool local_equal(const LocalRef& a, const LocalRef& b) {
    std::map<RecVar, int> ba, bb;
    return local_eq(a, b, ba, bb, 0);
}

} // namespace rtc
