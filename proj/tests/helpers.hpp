#pragma once

// Shared protocol builders and small utilities for the test suites.

#include "rtc/global.hpp"
#include "rtc/types.hpp"

#include <random>

namespace rtc::testutil {

// mu X. s -> c { login. c -> a: passwd<str>. a -> s: auth<bool>. X,
//                quit.  c -> a: quit. end }
inline GlobalRef g_auth() {
    auto login_cont = g_msg("c", "a", "passwd", m_end("str"),
                            g_msg("a", "s", "auth", m_end("bool"), g_var("X")));
    auto quit_cont = g_msg("c", "a", "quit", m_end(), g_end());
    std::map<Label, GlobalBranch> bs;
    bs.emplace("login", GlobalBranch{m_end(), login_cont});
    bs.emplace("quit", GlobalBranch{m_end(), quit_cont});
    return g_rec("X", g_exchange("s", "c", std::move(bs)));
}

// mu X. a -> b: 1. mu Y. a -> b: 2. mu Z. a -> b { x: X, y: Y, z: Z }
inline GlobalRef g_rec_nested() {
    std::map<Label, GlobalBranch> inner;
    inner.emplace("x", GlobalBranch{m_end(), g_var("X")});
    inner.emplace("y", GlobalBranch{m_end(), g_var("Y")});
    inner.emplace("z", GlobalBranch{m_end(), g_var("Z")});
    auto zrec = g_rec("Z", g_exchange("a", "b", std::move(inner)));
    auto yrec = g_rec("Y", g_msg("a", "b", "2", m_end(), zrec));
    return g_rec("X", g_msg("a", "b", "1", m_end(), yrec));
}

// p -> q { 1<int>. p->r:1<bool>. p->s:1<str>. q->r:1<unit>. q->s:1<int*int>. end,
//          2<int>. r->p:2<bool>. s->p:2<str>. r->q:2<unit>. s->q:2<int*int>. end }
inline GlobalRef g_msgs() {
    auto b1 = g_msg("p", "r", "1", m_end("bool"),
                    g_msg("p", "s", "1", m_end("str"),
                          g_msg("q", "r", "1", m_end("unit"),
                                g_msg("q", "s", "1", m_end("int * int"), g_end()))));
    auto b2 = g_msg("r", "p", "2", m_end("bool"),
                    g_msg("s", "p", "2", m_end("str"),
                          g_msg("r", "q", "2", m_end("unit"),
                                g_msg("s", "q", "2", m_end("int * int"), g_end()))));
    std::map<Label, GlobalBranch> bs;
    bs.emplace("1", GlobalBranch{m_end("int"), b1});
    bs.emplace("2", GlobalBranch{m_end("int"), b2});
    return g_exchange("p", "q", std::move(bs));
}

// p -> q: 1< !@8 int . end >. r -> t: 2<int>. p -> q: 3. end
inline GlobalRef g_intrl() {
    return g_msg("p", "q", "1", m_send(m_end("int"), m_end(), 8),
                 g_msg("r", "t", "2", m_end("int"), g_msg("p", "q", "3", m_end(), g_end())));
}

// The channel payload of g_deleg's first exchange:
// !@4 (?@12 bool . end) . &@4 { passwd: ?@5 str . +@10 { auth: !@11 bool . end } }
inline MsgRef deleg_payload() {
    std::map<Label, MsgRef> auth_sel;
    auth_sel.emplace("auth", m_send(m_end("bool"), m_end(), 11));
    std::map<Label, MsgRef> sp;
    sp.emplace("passwd", m_recv(m_end("str"), m_select(std::move(auth_sel), 10), 5));
    return m_send(m_recv(m_end("bool"), m_end(), 12), m_branch(std::move(sp), 4), 4);
}

// c -> p: login<S>. c -> s: passwd<str>. s -> c: auth<bool>. end
inline GlobalRef g_deleg() {
    return g_msg("c", "p", "login", deleg_payload(),
                 g_msg("c", "s", "passwd", m_end("str"),
                       g_msg("s", "c", "auth", m_end("bool"), g_end())));
}

// b -> a { ok. s -> a: pay<int>. end, cancel. s -> a: cancel. end }
inline GlobalRef g_rwf() {
    std::map<Label, GlobalBranch> bs;
    bs.emplace("ok", GlobalBranch{m_end(), g_msg("s", "a", "pay", m_end("int"), g_end())});
    bs.emplace("cancel", GlobalBranch{m_end(), g_msg("s", "a", "cancel", m_end(), g_end())});
    return g_exchange("b", "a", std::move(bs));
}

// b -> a { ok. b -> s: ok. s -> m: deliver<str>. end,
//          quit. b -> s: quit. s -> m: quit. end }
inline GlobalRef g_mwf() {
    std::map<Label, GlobalBranch> bs;
    bs.emplace("ok", GlobalBranch{m_end(), g_msg("b", "s", "ok", m_end(),
                                                 g_msg("s", "m", "deliver", m_end("str"), g_end()))});
    bs.emplace("quit", GlobalBranch{m_end(), g_msg("b", "s", "quit", m_end(),
                                                   g_msg("s", "m", "quit", m_end(), g_end()))});
    return g_exchange("b", "a", std::move(bs));
}

// Variant of g_mwf where s offers m the same options in both branches.
inline GlobalRef g_mwf2() {
    auto sm = [] {
        std::map<Label, GlobalBranch> bs;
        bs.emplace("deliver", GlobalBranch{m_end("str"), g_end()});
        bs.emplace("quit", GlobalBranch{m_end(), g_end()});
        return g_exchange("s", "m", std::move(bs));
    };
    std::map<Label, GlobalBranch> bs;
    bs.emplace("ok", GlobalBranch{m_end(), g_msg("b", "s", "ok", m_end(), sm())});
    bs.emplace("quit", GlobalBranch{m_end(), g_msg("b", "s", "quit", m_end(), sm())});
    return g_exchange("b", "a", std::move(bs));
}

// c -> f1: init<int*int>. c -> f2: init<int*int>. mu X. f1 -> c: next<int>. f2 -> c: next<int>. X
inline GlobalRef g_fib() {
    auto loop = g_rec("X", g_msg("f1", "c", "next", m_end("int"),
                                 g_msg("f2", "c", "next", m_end("int"), g_var("X"))));
    return g_msg("c", "f1", "init", m_end("int * int"),
                 g_msg("c", "f2", "init", m_end("int * int"), loop));
}

// p -> q { a. p -> r: a. end, b. r -> p: b. end }
inline GlobalRef g_h() {
    std::map<Label, GlobalBranch> bs;
    bs.emplace("a", GlobalBranch{m_end(), g_msg("p", "r", "a", m_end(), g_end())});
    bs.emplace("b", GlobalBranch{m_end(), g_msg("r", "p", "b", m_end(), g_end())});
    return g_exchange("p", "q", std::move(bs));
}

// mu X. a -> b: 1<int>. c -> d: 1<int>. X  -- every completed run has equal
// numbers of a->b and c->d exchanges, but unfair schedules can starve c->d.
inline GlobalRef g_presound() {
    return g_rec("X", g_msg("a", "b", "1", m_end("int"),
                            g_msg("c", "d", "1", m_end("int"), g_var("X"))));
}

// Deterministic random session types for law tests.
class TypeGen {
public:
    explicit TypeGen(std::uint64_t seed) : rng_(seed) {}

    TypeRef closed(int depth) { return go(depth, 0); }

private:
    std::mt19937_64 rng_;

    int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

    TypeRef go(int depth, int bound_vars) {
        if (depth <= 0) {
            if (bound_vars > 0 && pick(3) == 0)
                return t_var("T" + std::to_string(pick(bound_vars)));
            return t_bullet();
        }
        switch (pick(bound_vars > 0 ? 6 : 5)) {
        case 0:
            return t_bullet();
        case 1:
            return t_tensor(go(depth - 1, bound_vars), Priority::nat(pick(9)),
                            go(depth - 1, bound_vars));
        case 2:
            return t_parr(go(depth - 1, bound_vars), Priority::nat(pick(9)),
                          go(depth - 1, bound_vars));
        case 3: {
            std::map<Label, TypeRef> bs;
            int n = 1 + pick(3);
            for (int i = 0; i < n; ++i)
                bs["l" + std::to_string(i)] = go(depth - 1, bound_vars);
            return pick(2) ? t_plus(Priority::nat(pick(9)), std::move(bs))
                           : t_with(Priority::nat(pick(9)), std::move(bs));
        }
        case 4: {
            // tail-recursive body: connective around a var or bullet
            RecVar v = "T" + std::to_string(bound_vars);
            TypeRef body = t_tensor(t_bullet(), Priority::nat(pick(9)),
                                    go(depth - 1, bound_vars + 1));
            return t_rec(v, body);
        }
        default:
            return t_var("T" + std::to_string(pick(bound_vars)));
        }
    }
};

// Deterministic random global types for round-trip and fuzz tests.
class GlobalGen {
public:
    explicit GlobalGen(std::uint64_t seed, int max_participants = 4, int max_labels = 3)
        : rng_(seed), nparts_(max_participants), nlabels_(max_labels) {}

    GlobalRef gen(int depth) {
        std::vector<RecVar> bound;
        return go(depth, bound);
    }

private:
    std::mt19937_64 rng_;
    int nparts_, nlabels_;
    int rec_count_ = 0;

    int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

    Participant pname(int i) {
        static const char* names[] = {"p", "q", "r", "s"};
        return names[i];
    }

    MsgRef msg(int depth) {
        if (depth <= 0 || pick(5) < 3) {
            static const char* basics[] = {"", "unit", "bool", "int", "str", "int * int"};
            return m_end(basics[pick(6)]);
        }
        std::optional<std::uint64_t> ann;
        if (pick(2))
            ann = static_cast<std::uint64_t>(pick(9));
        switch (pick(4)) {
        case 0:
            return m_send(msg(depth - 1), msg(depth - 1), ann);
        case 1:
            return m_recv(msg(depth - 1), msg(depth - 1), ann);
        default: {
            std::map<Label, MsgRef> bs;
            int n = 1 + pick(nlabels_);
            for (int i = 0; i < n; ++i)
                bs["m" + std::to_string(i)] = msg(depth - 1);
            return pick(2) ? m_select(std::move(bs), ann) : m_branch(std::move(bs), ann);
        }
        }
    }

    // Would the parser reject `mu v. body` as an immediately-cyclic recursion?
    static bool cyclic_rec(const GlobalRef& body, const RecVar& v) {
        std::vector<RecVar> chain{v};
        GlobalRef h = body;
        while (h->kind == GlobalKind::Rec) {
            chain.push_back(h->var);
            h = h->body;
        }
        if (h->kind != GlobalKind::Var)
            return false;
        for (auto& c : chain)
            if (c == h->var)
                return true;
        return false;
    }

    GlobalRef go(int depth, std::vector<RecVar>& bound) {
        if (depth <= 0) {
            if (!bound.empty() && pick(2))
                return g_var(bound[static_cast<size_t>(pick(static_cast<int>(bound.size())))]);
            return g_end();
        }
        int r = pick(10);
        if (r < 5) {
            int si = pick(nparts_);
            int ri = pick(nparts_);
            while (ri == si)
                ri = pick(nparts_);
            std::map<Label, GlobalBranch> bs;
            int n = 1 + pick(nlabels_);
            for (int i = 0; i < n; ++i)
                bs.emplace("l" + std::to_string(i), GlobalBranch{msg(2), go(depth - 1, bound)});
            return g_exchange(pname(si), pname(ri), std::move(bs));
        }
        if (r < 7) {
            RecVar v = "X" + std::to_string(rec_count_++);
            bound.push_back(v);
            GlobalRef body = go(depth - 1, bound);
            bound.pop_back();
            if (cyclic_rec(body, v))
                body = g_msg(pname(0), pname(1), "l0", m_end(), body);
            return g_rec(v, body);
        }
        if (r < 8)
            return g_skip(go(depth - 1, bound));
        if (r < 9 && !bound.empty())
            return g_var(bound[static_cast<size_t>(pick(static_cast<int>(bound.size())))]);
        return g_end();
    }
};

} // namespace rtc::testutil
