#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "rtc/surface.hpp"
#include "rtc/synthesis.hpp"
#include "rtc/typecheck.hpp"

#include <map>
#include <string>

using namespace rtc;
using namespace rtc::testutil;

namespace {

TypeRef b() { return t_bullet(); }
Priority n(std::uint64_t v) { return Priority::nat(v); }

Endpoint ep(const std::string& hint) { return names().fresh(hint); }

void check_ok(const ProcRef& p, const TypeEnv& env, const CheckOptions& opts = {},
              DerivationStats* stats = nullptr) {
    auto err = typecheck(p, {}, env, opts, stats);
    CHECK_MESSAGE(!err, (err ? err->str() : ""));
}

TypeError check_fails(const ProcRef& p, const TypeEnv& env, const std::string& reason,
                      const CheckOptions& opts = {}) {
    auto err = typecheck(p, {}, env, opts);
    REQUIRE_MESSAGE(err, "expected failure with reason " << reason);
    CHECK_MESSAGE(err->reason == reason,
                  "expected " << reason << ", got " << err->str());
    return *err;
}

} // namespace

// ---------------------------------------------------------------------------
// Base rules
// ---------------------------------------------------------------------------

TEST_CASE("inaction needs nothing, and tolerates only unit leftovers") {
    check_ok(nil(), {});
    CHECK(!typecheck_closed(nil()));
    Endpoint x = ep("x");
    check_ok(nil(), {{x, b()}});
    check_ok(nil(), {{x, t_rec("X", t_var("X"))}}); // unfolds to nothing
    auto e = check_fails(nil(), {{x, t_tensor(b(), n(1), b())}}, "leftover-endpoint");
    CHECK(e.rule == "Bullet");
    CHECK(e.endpoint == x);
}

TEST_CASE("forwarders connect exactly dual endpoints") {
    Endpoint x = ep("x"), y = ep("y");
    check_ok(fwd(x, y), {{x, t_tensor(b(), n(1), b())}, {y, t_parr(b(), n(1), b())}});
    check_ok(fwd(x, y), {{x, b()}, {y, b()}});
    check_fails(fwd(x, y), {{x, t_tensor(b(), n(1), b())}, {y, t_parr(b(), n(2), b())}},
                "duality-mismatch");
    check_fails(fwd(x, y), {{x, t_tensor(b(), n(1), b())}}, "unbound-endpoint");
}

TEST_CASE("cut checking compares up to unfolding") {
    CHECK(!check_cut(t_tensor(b(), n(3), b()), t_parr(b(), n(3), b())));
    CHECK(check_cut(t_tensor(b(), n(3), b()), t_parr(b(), n(4), b())));
    CHECK(check_cut(t_tensor(b(), n(3), b()), t_tensor(b(), n(3), b())));
    auto rec = t_rec("X", t_plus(n(0), {{"l", t_var("X")}}));
    auto unrolled = t_plus(n(0), {{"l", rec}});
    CHECK(!check_cut(rec, dual(unrolled)));
    CHECK(!check_cut(unrolled, dual(rec)));
}

TEST_CASE("output axiom types its objects as duals of the halves") {
    Endpoint x = ep("x");
    check_ok(sug_out(x, ep("y"), nil()), {{x, t_tensor(b(), n(5), b())}});
    // a payload annotation that contradicts the subject's type
    Endpoint y = ep("y");
    auto e = check_fails(sug_out(x, y, sug_in(y, ep("u"), nil()), t_parr(b(), n(1), b())),
                         {{x, t_tensor(b(), n(5), b())}}, "duality-mismatch");
    CHECK(e.rule == "Tensor");
    check_fails(out(x, ep("y"), ep("z")), {}, "unbound-endpoint");
    check_fails(sug_out(x, ep("y"), nil()), {{x, t_parr(b(), n(5), b())}}, "shape-mismatch");
}

TEST_CASE("selection axiom needs its label in the type") {
    Endpoint x = ep("x");
    auto a = t_plus(n(0), {{"go", b()}, {"stop", t_tensor(b(), n(1), b())}});
    check_ok(sug_sel(x, "go", nil()), {{x, a}});
    check_fails(sug_sel(x, "missing", nil()), {{x, a}}, "label-mismatch");
    check_fails(sug_sel(x, "go", nil()), {{x, t_with(n(0), {{"go", b()}})}}, "shape-mismatch");
}

TEST_CASE("branching must offer exactly the labels of the type") {
    Endpoint x = ep("x");
    auto a = t_with(n(0), {{"l", b()}, {"r", b()}});
    check_ok(sug_bra(x, {{"l", nil()}, {"r", nil()}}), {{x, a}});
    check_fails(sug_bra(x, {{"l", nil()}}), {{x, a}}, "label-mismatch");
    check_fails(sug_bra(x, {{"l", nil()}, {"r", nil()}, {"zz", nil()}}), {{x, a}},
                "label-mismatch");
}

TEST_CASE("inputs and branches must act before everything they delay") {
    Endpoint x = ep("x"), z = ep("z");
    // x waits at priority 5 while z could act at 3: rejected.
    auto e = check_fails(sug_in(x, ep("y"), sug_out(z, ep("w"), nil())),
                         {{x, t_parr(b(), n(5), b())}, {z, t_tensor(b(), n(3), b())}},
                         "priority-violation");
    CHECK(e.rule == "Parr");
    CHECK(e.o == n(5));
    CHECK(e.pr == n(3));
    // the other order is fine
    check_ok(sug_in(x, ep("y"), sug_out(z, ep("w"), nil())),
             {{x, t_parr(b(), n(2), b())}, {z, t_tensor(b(), n(3), b())}});
    // same discipline for external choice
    auto f = check_fails(
        sug_bra(x, {{"l", sug_out(z, ep("w"), nil())}}),
        {{x, t_with(n(4), {{"l", b()}})}, {z, t_tensor(b(), n(4), b())}},
        "priority-violation");
    CHECK(f.rule == "With");
}

TEST_CASE("parallel components may not share an endpoint") {
    Endpoint x = ep("x"), y = ep("y"), z = ep("z");
    auto e = check_fails(par(fwd(x, y), fwd(x, z)),
                         {{x, t_tensor(b(), n(1), b())},
                          {y, t_parr(b(), n(1), b())},
                          {z, t_parr(b(), n(1), b())}},
                         "linearity");
    CHECK(e.rule == "Mix");
}

TEST_CASE("restrictions use the annotation or infer the cut type") {
    Endpoint x = ep("x"), y = ep("y");
    check_ok(res(x, y, fwd(x, y), t_tensor(b(), n(1), b())), {});
    // a bare forwarder admits any cut type, so nothing can be inferred
    check_fails(res(x, y, fwd(x, y)), {}, "cannot-infer");
    // both ends unused: the unit cut is the only possibility
    check_ok(res(x, y, nil()), {});
    // inferable from an output object's position
    Endpoint u = ep("u"), v = ep("v");
    check_ok(sug_out(u, v, sug_in(v, ep("w"), nil())),
             {{u, t_tensor(t_parr(b(), n(9), b()), n(2), b())}});
    // two inputs facing each other offer nothing to infer from
    check_fails(res(x, y, par(sug_in(x, ep("a"), nil()), sug_in(y, ep("c"), nil()))), {},
                "cannot-infer");
    // ... and with an annotation the shapes still have to line up
    check_ok(res(x, y, par(sug_in(x, ep("a"), nil()), sug_out(y, ep("c"), nil())),
                 t_parr(b(), n(1), b())),
             {});
    check_fails(res(x, y, par(sug_in(x, ep("a"), nil()), sug_in(y, ep("c"), nil())),
                    t_parr(b(), n(1), b())),
                {}, "shape-mismatch");
}

TEST_CASE("alarms are only legal where the checker allows surrender") {
    Endpoint x = ep("x"), y = ep("y");
    TypeEnv env{{x, t_tensor(b(), n(1), b())}, {y, t_rec("X", t_plus(n(0), {{"l", t_var("X")}}))}};
    check_ok(alarm({x, y}), env); // any types at all
    check_fails(alarm({x, y}), env, "alarm-forbidden", CheckOptions{false});
    check_fails(alarm({x, x}), {{x, t_tensor(b(), n(1), b())}}, "linearity");
    check_fails(alarm({x, y, ep("z")}), env, "unbound-endpoint");
    check_fails(alarm({x}), env, "leftover-endpoint"); // y not surrendered
}

TEST_CASE("constant carriers must sit at the unit type") {
    Endpoint x = ep("x");
    check_ok(constant(x, "33"), {{x, b()}});
    check_ok(constant(x, "pwd123"), {{x, t_rec("X", t_var("X"))}});
    check_fails(constant(x, "33"), {{x, t_tensor(b(), n(1), b())}}, "not-bullet");
    check_fails(constant(x, "33"), {}, "unbound-endpoint");
}

// ---------------------------------------------------------------------------
// Recursion
// ---------------------------------------------------------------------------

TEST_CASE("loops unfold their parameter types by a computed lift") {
    Endpoint x = ep("x");
    auto a = t_rec("X", t_plus(n(0), {{"l", t_var("X")}}));
    ProcRef loop = rec_def("X", {x}, sug_sel(x, "l", rec_call("X", {x})));
    DerivationStats stats;
    check_ok(loop, {{x, a}}, {}, &stats);
    CHECK(stats.rule_counts["Rec"] == 1);
    CHECK(stats.rule_counts["Var"] == 1);
    CHECK(stats.rule_counts["Plus"] == 1);
}

TEST_CASE("loop parameter types must be recursive and contractive") {
    Endpoint x = ep("x");
    ProcRef loop = rec_def("X", {x}, rec_call("X", {x}));
    check_fails(loop, {{x, t_rec("X", t_var("X"))}}, "unguarded-variable");
    check_fails(rec_def("X", {x}, nil()), {{x, t_rec("X", b())}}, "non-contractive");
    check_fails(loop, {{x, t_tensor(b(), n(1), b())}}, "shape-mismatch");
    auto e = check_fails(rec_def("X", {x, x}, nil()), {{x, t_rec("X", t_var("X"))}},
                         "linearity");
    CHECK(e.rule == "Rec");
}

TEST_CASE("loops rename apart from the type's own variable name") {
    Endpoint x = ep("x");
    // type recursion variable Y, loop variable X: aligned by renaming
    auto a = t_rec("Y", t_plus(n(0), {{"l", t_var("Y")}}));
    check_ok(rec_def("X", {x}, sug_sel(x, "l", rec_call("X", {x}))), {{x, a}});
    // renaming must refuse to capture a stray free occurrence of the loop's
    // own variable inside the type body
    auto trap = t_rec("Y", t_plus(n(0), {{"l", t_var("X")}}));
    check_fails(rec_def("X", {x}, sug_sel(x, "l", rec_call("X", {x}))), {{x, trap}},
                "variable-capture");
}

TEST_CASE("endpoints that are live at a loop must be parameters") {
    Endpoint x = ep("x"), y = ep("y");
    auto a = t_rec("X", t_plus(n(0), {{"l", t_var("X")}}));
    ProcRef loop =
        rec_def("X", {x}, sug_sel(x, "l", par(rec_call("X", {x}), fwd(y, ep("z")))));
    auto e = typecheck(loop, {}, {{x, a}, {y, b()}});
    REQUIRE(e);
    CHECK(e->reason == "leftover-endpoint");
    CHECK(e->rule == "Rec");
}

TEST_CASE("calls infer a common lift across all arguments") {
    Endpoint x = ep("x"), y = ep("y");
    auto bx = t_plus(n(2), {{"l", t_var("X")}});
    auto by = t_plus(n(4), {{"m", t_var("X")}});
    RecEnv omega{{"X", {bx, by}}};
    // both arguments sit exactly 3 above the loop types
    TypeEnv good{{x, t_rec("X", t_plus(n(5), {{"l", t_var("X")}}))},
                 {y, t_rec("X", t_plus(n(7), {{"m", t_var("X")}}))}};
    CHECK(!typecheck(rec_call("X", {x, y}), omega, good));
    // inconsistent lifts
    TypeEnv skew{{x, t_rec("X", t_plus(n(5), {{"l", t_var("X")}}))},
                 {y, t_rec("X", t_plus(n(8), {{"m", t_var("X")}}))}};
    auto e1 = typecheck(rec_call("X", {x, y}), omega, skew);
    REQUIRE(e1);
    CHECK(e1->reason == "lift-mismatch");
    // sitting below the loop types is just as wrong
    TypeEnv below{{x, t_rec("X", t_plus(n(1), {{"l", t_var("X")}}))},
                  {y, t_rec("X", t_plus(n(3), {{"m", t_var("X")}}))}};
    auto e2 = typecheck(rec_call("X", {x, y}), omega, below);
    REQUIRE(e2);
    CHECK(e2->reason == "lift-mismatch");
    // arity and scoping
    TypeEnv only_x{{x, t_rec("X", t_plus(n(5), {{"l", t_var("X")}}))}};
    auto e3 = typecheck(rec_call("X", {x}), omega, only_x);
    REQUIRE(e3);
    CHECK(e3->reason == "arity-mismatch");
    auto e4 = typecheck(rec_call("Y", {x}), {}, only_x);
    REQUIRE(e4);
    CHECK(e4->reason == "unbound-recvar");
}

// ---------------------------------------------------------------------------
// The authorization participants (client, server, arbiter)
// ---------------------------------------------------------------------------

namespace {

TypeRef client_type() {
    return t_rec(
        "X", t_with(n(2), {{"login", t_parr(b(), n(3), t_plus(n(4), {{"passwd",
                                t_tensor(b(), n(5), t_var("X"))}}))},
                           {"quit", t_parr(b(), n(3), t_plus(n(4), {{"quit",
                                t_tensor(b(), n(5), b())}}))}}));
}

TypeRef server_type() {
    return t_rec("X", t_plus(n(0), {{"login", t_tensor(b(), n(1), t_with(n(10), {{"auth",
                                         t_parr(b(), n(11), t_var("X"))}}))},
                                    {"quit", t_tensor(b(), n(1), b())}}));
}

TypeRef arbiter_type() {
    return t_rec("X", t_with(n(2), {{"login", t_with(n(6), {{"passwd",
                                         t_parr(b(), n(7), t_plus(n(8), {{"auth",
                                             t_tensor(b(), n(9), t_var("X"))}}))}})},
                                    {"quit", t_with(n(6), {{"quit",
                                         t_parr(b(), n(7), b())}})}}));
}

ProcRef client_proc(const Endpoint& c) {
    Endpoint k = ep("k"); // payload endpoint carrying the password constant
    ProcRef login =
        sug_in(c, ep("u"),
               sug_sel(c, "passwd",
                       sug_out(c, k, par(constant(k, "logmein345"),
                                         rec_call("X", {c})))));
    ProcRef quit = sug_in(c, ep("w"), sug_sel(c, "quit", sug_out(c, ep("z"), nil())));
    return rec_def("X", {c}, sug_bra(c, {{"login", login}, {"quit", quit}}));
}

ProcRef server_proc(const Endpoint& s) {
    return rec_def(
        "X", {s},
        sug_sel(s, "login",
                sug_out(s, ep("u"),
                        sug_bra(s, {{"auth", sug_in(s, ep("v"), rec_call("X", {s}))}}))));
}

ProcRef arbiter_proc(const Endpoint& a) {
    ProcRef login = sug_bra(
        a, {{"passwd", sug_in(a, ep("u"),
                              sug_sel(a, "auth",
                                      sug_out(a, ep("v"), rec_call("X", {a}))))}});
    ProcRef quit = sug_bra(a, {{"quit", sug_in(a, ep("w"), nil())}});
    return rec_def("X", {a}, sug_bra(a, {{"login", login}, {"quit", quit}}));
}

} // namespace

TEST_CASE("the authorization participants typecheck at their projected types") {
    GlobalRef g = g_auth();

    Endpoint c = ep("c");
    DerivationStats stats;
    check_ok(client_proc(c), {{c, client_type()}}, CheckOptions{false}, &stats);
    CHECK(stats.rule_counts["Rec"] == 1);
    CHECK(stats.rule_counts["Var"] == 1);
    CHECK(stats.rule_counts["With"] == 1);
    CHECK(stats.rule_counts["Parr"] == 2);
    CHECK(stats.rule_counts["Plus"] == 2);
    CHECK(stats.rule_counts["Tensor"] == 2);
    CHECK(stats.rule_counts["Unit"] == 1);
    CHECK(stats.max_priority == 5);

    Endpoint s = ep("s");
    check_ok(server_proc(s), {{s, server_type()}}, CheckOptions{false});
    Endpoint a = ep("a");
    check_ok(arbiter_proc(a), {{a, arbiter_type()}}, CheckOptions{false});

    // the frozen types are exactly the local projections of the protocol
    CHECK(type_equal(client_type(), std::get<TypeRef>(local_project(g, "c", 0))));
    CHECK(type_equal(server_type(), std::get<TypeRef>(local_project(g, "s", 0))));
    CHECK(type_equal(arbiter_type(), std::get<TypeRef>(local_project(g, "a", 0))));
}

TEST_CASE("the client fails against foreign or dualized types") {
    Endpoint c = ep("c");
    CHECK(typecheck(client_proc(c), {}, {{c, server_type()}}, CheckOptions{false}));
    CHECK(typecheck(client_proc(c), {}, {{c, dual(client_type())}}, CheckOptions{false}));
    CHECK(typecheck(client_proc(c), {}, {{c, arbiter_type()}}, CheckOptions{false}));
    // a process with one endpoint is polymorphic in consistent priority
    // shifts, though: the same client checks against the lifted type
    CHECK(!typecheck(client_proc(c), {}, {{c, lift(3, client_type())}},
                     CheckOptions{false}));
}

TEST_CASE("characteristic closure: each participant against its dual") {
    for (TypeRef a : {client_type(), server_type(), arbiter_type()}) {
        Endpoint x = ep("x"), y = ep("y");
        ProcRef net = res(x, y,
                          par(characteristic_process(x, a),
                              characteristic_process(y, dual(a))),
                          a);
        CHECK(!typecheck_closed(net));
    }
}

// ---------------------------------------------------------------------------
// The interleaving implementations and their priority discipline
// ---------------------------------------------------------------------------

TEST_CASE("interleaving two sessions typechecks only under the right priorities") {
    Endpoint cp = ep("cp"), ct = ep("ct");
    auto chan = t_tensor(b(), n(8), b());
    auto cp_t = t_plus(n(0), {{"1", t_tensor(chan, n(1),
                                   t_plus(n(8), {{"3", t_tensor(b(), n(9), b())}}))}});
    auto ct_t = t_with(n(6), {{"2", t_parr(b(), n(7), b())}});

    auto build = [&](const Endpoint& p, const Endpoint& t) {
        Endpoint s = ep("s"), v = ep("v"), w = ep("w"), z = ep("z");
        ProcRef a = sug_bra(t, {{"2", sug_in(t, v, sug_out(s, w, fwd(v, w)))}});
        ProcRef bpart = sug_sel(p, "3", sug_out(p, z, nil()));
        return sug_sel(p, "1", sug_out(p, s, par(std::move(a), std::move(bpart))));
    };
    check_ok(build(cp, ct), {{cp, cp_t}, {ct, ct_t}}, CheckOptions{false});

    // shift the delegated channel down to priority 5: now t's branch at 6
    // would have to wait on something that must act first
    auto chan_low = t_tensor(b(), n(5), b());
    auto cp_low = t_plus(n(0), {{"1", t_tensor(chan_low, n(1),
                                     t_plus(n(8), {{"3", t_tensor(b(), n(9), b())}}))}});
    auto e = typecheck(build(cp, ct), {}, {{cp, cp_low}, {ct, ct_t}}, CheckOptions{false});
    REQUIRE(e);
    CHECK(e->reason == "priority-violation");
}

TEST_CASE("the receiving side of the interleaving example") {
    Endpoint cq = ep("cq");
    auto cq_t = t_with(n(2), {{"1", t_parr(t_parr(b(), n(8), b()), n(3),
                                   t_with(n(10), {{"3", t_parr(b(), n(11), b())}}))}});
    Endpoint y = ep("y"), x = ep("x"), u = ep("u");
    ProcRef p2 = sug_bra(
        cq, {{"1", sug_in(cq, y, sug_in(y, x, sug_bra(cq, {{"3", sug_in(cq, u, nil())}})))}});
    check_ok(p2, {{cq, cq_t}}, CheckOptions{false});
}

// ---------------------------------------------------------------------------
// Environment helpers
// ---------------------------------------------------------------------------

TEST_CASE("bullet equivalence sees through recursion but not connectives") {
    CHECK(bullet_equivalent(b()));
    CHECK(bullet_equivalent(t_rec("X", t_var("X"))));
    CHECK(bullet_equivalent(t_rec("X", b())));
    CHECK(bullet_equivalent(t_rec("X", t_rec("Y", t_var("X")))));
    CHECK(!bullet_equivalent(t_var("X")));
    CHECK(!bullet_equivalent(t_tensor(b(), n(1), b())));
    CHECK(!bullet_equivalent(t_rec("X", t_plus(n(0), {{"l", t_var("X")}}))));
}

TEST_CASE("environment priority and lifting") {
    Endpoint x = ep("x"), y = ep("y"), z = ep("z");
    CHECK(env_priority({}) == Priority::omega());
    CHECK(env_priority({{x, b()}}) == Priority::omega());
    TypeEnv env{{x, t_parr(b(), n(5), b())}, {y, t_tensor(b(), n(3), b())}, {z, b()}};
    CHECK(env_priority(env) == n(3));
    TypeEnv lifted = lift_env(env, 4);
    CHECK(env_priority(lifted) == n(7));
    CHECK(type_equal(lifted.at(x), t_parr(b(), n(9), b())));
    CHECK(type_equal(lifted.at(z), b()));
}

TEST_CASE("recursive types keep their priority at the unfolding") {
    auto a = t_rec("X", t_plus(n(4), {{"l", t_var("X")}}));
    CHECK(priority(a) == n(4));
    CHECK(priority(b()) == Priority::omega());
    CHECK(max_priority(client_type()) == 5);
    CHECK(max_priority(server_type()) == 11);
}
