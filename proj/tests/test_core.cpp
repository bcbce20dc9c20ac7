#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "rtc/global.hpp"
#include "rtc/process.hpp"
#include "rtc/types.hpp"

using namespace rtc;
using rtc::testutil::TypeGen;

TEST_CASE("participants") {
    CHECK(participants(testutil::g_auth()) == std::set<Participant>{"a", "c", "s"});
    CHECK(participants(g_end()).empty());
    auto g = g_rec("X", g_msg("p", "q", "1", m_end(), g_var("X")));
    CHECK(participants(g) == std::set<Participant>{"p", "q"});
}

TEST_CASE("dual basics") {
    CHECK(type_equal(dual(t_bullet()), t_bullet()));
    auto a = t_tensor(t_bullet(), Priority::nat(5), t_bullet());
    auto d = dual(a);
    CHECK(d->kind == TypeKind::Parr);
    CHECK(d->prio == Priority::nat(5));
    std::map<Label, TypeRef> bs{{"l", a}};
    auto p = t_plus(Priority::nat(2), bs);
    CHECK(dual(p)->kind == TypeKind::With);
    auto r = t_rec("X", t_parr(t_bullet(), Priority::nat(7), t_var("X")));
    CHECK(dual(r)->kind == TypeKind::Rec);
    CHECK(dual(r)->body->kind == TypeKind::Tensor);
}

TEST_CASE("priority") {
    CHECK(priority(t_tensor(t_bullet(), Priority::nat(3), t_bullet())) == Priority::nat(3));
    CHECK(priority(t_bullet()).is_omega());
    CHECK(priority(t_var("X")).is_omega());
    auto r = t_rec("X", t_parr(t_bullet(), Priority::nat(7), t_var("X")));
    CHECK(priority(r) == Priority::nat(7));
}

TEST_CASE("max_priority") {
    CHECK(max_priority(t_bullet()) == 0);
    std::map<Label, TypeRef> bs{{"l", t_tensor(t_bullet(), Priority::nat(5), t_bullet())}};
    CHECK(max_priority(t_plus(Priority::nat(2), bs)) == 5);
    std::map<Label, TypeRef> bs2{{"a", t_parr(t_bullet(), Priority::nat(9), t_var("X"))}};
    CHECK(max_priority(t_rec("X", t_with(Priority::nat(1), bs2))) == 9);
}

TEST_CASE("lift") {
    auto a = t_tensor(t_bullet(), Priority::nat(1), t_bullet());
    CHECK(type_equal(lift(0, a), a));
    CHECK(priority(lift(4, a)) == Priority::nat(5));
    TypeGen gen(7);
    for (int i = 0; i < 200; ++i) {
        auto t = gen.closed(3);
        if (!priority(t).is_omega())
            CHECK(priority(lift(3, t)) == priority(t).plus(3));
    }
}

TEST_CASE("unfold_session") {
    CHECK(type_equal(unfold_session(5, t_rec("X", t_bullet())), t_bullet()));
    auto a = t_rec("X", t_tensor(t_bullet(), Priority::nat(1), t_var("X")));
    auto u = unfold_session(2, a);
    auto expect = t_tensor(t_bullet(), Priority::nat(1),
                           t_rec("X", t_tensor(t_bullet(), Priority::nat(3), t_var("X"))));
    CHECK(type_equal(u, expect));
    CHECK_THROWS(unfold_session(0, t_bullet()));
}

TEST_CASE("deep_unfold") {
    auto a = t_rec("X", t_tensor(t_bullet(), Priority::nat(1), t_var("X")))->body;
    CHECK(type_equal(deep_unfold(a, {}), a));
    DeepUnfoldSpec spec{{"X", 2, a}};
    CHECK(type_equal(deep_unfold(a, spec), unfold_session(2, t_rec("X", a))));
    CHECK(type_equal(deep_unfold(t_bullet(), spec), t_bullet()));
}

TEST_CASE("unfold_global") {
    CHECK(global_equal(unfold_global(g_rec("X", g_end())), g_end()));
    auto g = g_rec("X", g_msg("p", "q", "1", m_end(), g_var("X")));
    auto u = unfold_global(g);
    CHECK(u->kind == GlobalKind::Exchange);
    CHECK(global_equal(u->branches.at("1").cont, g));
    auto grec = testutil::g_rec_nested();
    auto urec = unfold_global(grec);
    CHECK(urec->kind == GlobalKind::Exchange);
    CHECK(urec->sender == "a");
    CHECK(urec->branches.count("1") == 1);
    CHECK_THROWS(unfold_global(g_end()));
}

TEST_CASE("contractive") {
    // skip. mu Y. skip. X is not contractive on X
    auto r = r_skip(r_rec("Y", r_skip(r_var("X"))));
    CHECK_FALSE(contractive_relative(r, "X"));
    std::map<Label, RelBranch> bs;
    bs.emplace("l", RelBranch{m_end(), r_var("X")});
    CHECK(contractive_relative(r_msg("p", std::move(bs)), "X"));
    CHECK_FALSE(contractive_relative(r_var("X"), "X"));
    CHECK(contractive_relative(r_var("Y"), "X"));

    CHECK_FALSE(contractive_session(t_var("X"), "X"));
    CHECK(contractive_session(t_var("Y"), "X"));
    CHECK(contractive_session(t_tensor(t_bullet(), Priority::nat(0), t_var("X")), "X"));
    CHECK_FALSE(contractive_session(t_bullet(), "X"));
}

TEST_CASE("type laws on random types") {
    TypeGen gen(42);
    for (int i = 0; i < 400; ++i) {
        auto a = gen.closed(4);
        CHECK(type_equal(dual(dual(a)), a));
        CHECK(type_equal(lift(2, lift(3, a)), lift(5, a)));
        CHECK(type_equal(dual(lift(4, a)), lift(4, dual(a))));
        if (a->kind == TypeKind::Rec) {
            CHECK(type_equal(dual(unfold_session(3, a)), unfold_session(3, dual(a))));
        }
    }
}

TEST_CASE("participants stable under unfolding") {
    auto g = testutil::g_auth();
    CHECK(participants(g) == participants(unfold_global(g)));
    auto grec = testutil::g_rec_nested();
    CHECK(participants(grec) == participants(unfold_global(grec)));
}

TEST_CASE("equirecursive equality") {
    auto a = t_rec("X", t_tensor(t_bullet(), Priority::nat(1), t_var("X")));
    CHECK(type_equal_unfolded(a, unfold_session(0, a)));
    CHECK(type_equal_unfolded(unfold_session(0, a), a));
    auto b = t_rec("Y", t_tensor(t_bullet(), Priority::nat(1), t_var("Y")));
    CHECK(type_equal(a, b));
    auto c = t_rec("X", t_tensor(t_bullet(), Priority::nat(2), t_var("X")));
    CHECK_FALSE(type_equal_unfolded(a, c));
}

TEST_CASE("process construction and alpha equivalence") {
    auto& ng = names();
    Endpoint x = ng.fresh("x"), y = ng.fresh("y"), z = ng.fresh("z");
    Endpoint v = ng.fresh("v"), w = ng.fresh("w");
    auto p = in_(x, y, z, par(fwd(y, v), fwd(z, w)));
    CHECK(free_endpoints(p) == std::set<Endpoint>{x, v, w});

    // alpha: binder names do not matter
    Endpoint y2 = ng.fresh("other"), z2 = ng.fresh("other2");
    auto q = in_(x, y2, z2, par(fwd(y2, v), fwd(z2, w)));
    CHECK(alpha_equal(p, q));
    auto q2 = in_(x, y2, z2, par(fwd(z2, v), fwd(y2, w)));
    CHECK_FALSE(alpha_equal(p, q2));

    // substitution renames free names only
    Endpoint v2 = ng.fresh("v2");
    auto s = subst(p, {{v, v2}});
    CHECK(free_endpoints(s) == std::set<Endpoint>{x, v2, w});
    CHECK(alpha_equal(refresh_bound(p), p));
}

TEST_CASE("sugared actions desugar per the paper") {
    auto& ng = names();
    Endpoint x = ng.fresh("x"), y = ng.fresh("y");
    // x!(y). x<->y  ==  nu(y a) nu(z b) (x[a,b] || z<->y)
    auto p = sug_out(x, y, fwd(x, y));
    REQUIRE(p->kind == ProcKind::Res);
    REQUIRE(p->body->kind == ProcKind::Res);
    auto inner = p->body->body;
    REQUIRE(inner->kind == ProcKind::Par);
    CHECK(inner->parts[0]->kind == ProcKind::Out);
    CHECK(inner->parts[0]->x == x);
    CHECK(free_endpoints(p) == std::set<Endpoint>{x});

    auto q = sug_sel(x, "go", nil());
    REQUIRE(q->kind == ProcKind::Res);
    auto qp = q->body;
    REQUIRE(qp->kind == ProcKind::Sel);
    CHECK(qp->label == "go");
    CHECK(free_endpoints(q) == std::set<Endpoint>{x});

    auto r = sug_in(x, y, fwd(x, y));
    REQUIRE(r->kind == ProcKind::In);
    CHECK(r->x == x);
    CHECK(free_endpoints(r) == std::set<Endpoint>{x});

    auto br = sug_bra(x, {{"l", fwd(x, y)}, {"m", nil()}});
    REQUIRE(br->kind == ProcKind::Bra);
    CHECK(free_endpoints(br) == std::set<Endpoint>{x, y});
}
