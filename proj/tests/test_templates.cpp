#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scengen/errors.hpp"
#include "scengen/generator.hpp"
#include "scengen/templates.hpp"

#include "oracle.hpp"

using namespace scengen;

namespace {

Assignment only(const MonitorPtr& m, std::uint64_t rank) {
    return Assignment(m->alphabet(), m->alphabet()->unrank(rank));
}

// Replays a prefix and returns the admissible set at the end.
std::vector<Assignment> admissible_after(const MonitorPtr& m,
                                         const std::vector<Assignment>& steps) {
    StateKey x = m->initial_state();
    for (const auto& u : steps) {
        auto next = m->step(x, u);
        REQUIRE(next.has_value());
        x = *next;
    }
    std::vector<Assignment> out;
    for (auto r : m->admissible(x))
        out.push_back(only(m, r));
    return out;
}

} // namespace

TEST_CASE("recovery window reproduces the one-jet fault monitor") {
    auto m = make_recovery_window({"j", {"-", "f", "r"}}, "f", "r", 2, 3);
    auto g = explore(*m);
    CHECK(g.state_count() == 4);
    CHECK(g.edge_count() == 6);

    auto a = m->alphabet();
    auto in = [&](const std::string& v) { return Assignment::from_bindings(a, {{"j", v}}); };
    // repair allowed exactly 2 or 3 steps after the fault
    CHECK(m->step(m->initial_state(), in("r")) == std::nullopt);
    auto after_fault = admissible_after(m, {in("f")});
    REQUIRE(after_fault.size() == 1); // only '-' (repair too early, fault pending)
    CHECK(after_fault[0].value_of("j") == "-");
    auto at2 = admissible_after(m, {in("f"), in("-")});
    CHECK(at2.size() == 2); // '-' or 'r'
    auto at3 = admissible_after(m, {in("f"), in("-"), in("-")});
    REQUIRE(at3.size() == 1); // must repair now
    CHECK(at3[0].value_of("j") == "r");
}

TEST_CASE("recovery window validates its arguments") {
    VariableDecl j{"j", {"-", "f", "r"}};
    CHECK_THROWS_AS(make_recovery_window(j, "f", "r", 3, 2), DomainError);
    CHECK_THROWS_AS(make_recovery_window(j, "f", "r", 0, 2), DomainError);
    CHECK_THROWS_AS(make_recovery_window(j, "f", "f", 2, 3), DomainError);
    CHECK_THROWS_AS(make_recovery_window(j, "nope", "r", 2, 3), DomainError);
}

TEST_CASE("recurrence forces the event into its window") {
    auto m = make_recurrence({"s", {"-", "e"}}, {"e"}, 3, 4);
    auto a = m->alphabet();
    auto in = [&](const std::string& v) { return Assignment::from_bindings(a, {{"s", v}}); };

    // too early: e at step 0 or 1 is inadmissible (gap would be 1 or 2)
    CHECK(m->step(m->initial_state(), in("e")) == std::nullopt);
    auto at2 = admissible_after(m, {in("-"), in("-")});
    CHECK(at2.size() == 2); // gap 3 reachable: both '-' and 'e'
    // at gap 4 the event is forced
    auto at3 = admissible_after(m, {in("-"), in("-"), in("-")});
    REQUIRE(at3.size() == 1);
    CHECK(at3[0].value_of("s") == "e");
    // after an event the window restarts
    auto reset = admissible_after(m, {in("-"), in("-"), in("e")});
    REQUIRE(reset.size() == 1);
    CHECK(reset[0].value_of("s") == "-");
}

TEST_CASE("response window with a degenerate window forces the response at t+2") {
    std::vector<VariableDecl> vars{{"a", {"0", "T"}}, {"b", {"0", "R"}}};
    auto m = make_response_window(vars, EventSpec::value_in("a", {"T"}),
                                  EventSpec::value_in("b", {"R"}), 2, 2);
    auto alpha = m->alphabet();
    auto in = [&](const std::string& av, const std::string& bv) {
        return Assignment::from_bindings(alpha, {{"a", av}, {"b", bv}});
    };
    // trigger at t: next step (distance 1) must not respond, distance 2 must
    auto at1 = admissible_after(m, {in("T", "0")});
    for (const auto& u : at1)
        CHECK(u.value_of("b") == "0"); // early response inadmissible
    auto at2 = admissible_after(m, {in("T", "0"), in("0", "0")});
    for (const auto& u : at2)
        CHECK(u.value_of("b") == "R"); // only responses admissible now
    CHECK(at2.size() == 2); // the response may also open a fresh obligation
    // unsolicited responses are no-ops
    CHECK(m->step(m->initial_state(), in("0", "R")).has_value());
}

TEST_CASE("response window triggers on changes when asked") {
    std::vector<VariableDecl> vars{{"x", {"lo", "hi"}}, {"y", {"lo", "hi"}}};
    auto m = make_response_window(vars, EventSpec::changed("x"), EventSpec::changed("y"), 1, 2);
    auto alpha = m->alphabet();
    auto in = [&](const std::string& xv, const std::string& yv) {
        return Assignment::from_bindings(alpha, {{"x", xv}, {"y", yv}});
    };
    // no change events on the very first step
    CHECK(m->step(m->initial_state(), in("hi", "hi")).has_value());
    // x changes at step 1 -> y must change at step 2 or 3
    auto blocked = admissible_after(m, {in("lo", "lo"), in("hi", "lo"), in("hi", "lo")});
    for (const auto& u : blocked)
        CHECK(u.value_of("y") == "hi"); // y must move now (distance 2)
}

TEST_CASE("response window sustain: the obligation opens after two trigger steps") {
    std::vector<VariableDecl> vars{{"r", {"0", "go"}}, {"j", {"ok", "down"}}};
    auto m = make_response_window(vars, EventSpec::value_in("r", {"go"}),
                                  EventSpec::value_in("j", {"down"}), 1, 2, 2);
    auto alpha = m->alphabet();
    auto in = [&](const std::string& rv, const std::string& jv) {
        return Assignment::from_bindings(alpha, {{"r", rv}, {"j", jv}});
    };
    // one 'go' step alone opens nothing: j can stay ok for long
    auto free1 = admissible_after(m, {in("go", "ok"), in("0", "ok"), in("0", "ok")});
    CHECK(free1.size() == 4);
    // two consecutive 'go' steps open the window [1,2]
    auto after2 = admissible_after(m, {in("go", "ok"), in("go", "ok"), in("0", "ok")});
    for (const auto& u : after2)
        CHECK(u.value_of("j") == "down"); // distance 2: response forced
}

TEST_CASE("at_most_k value mode excludes making both variables busy") {
    std::vector<VariableDecl> vars{{"p", {"idle", "busy"}}, {"q", {"idle", "busy"}}};
    auto m = make_at_most_k(vars, {{"p", {"busy"}, {}}, {"q", {"busy"}, {}}}, 1);
    auto alpha = m->alphabet();
    auto both = Assignment::from_bindings(alpha, {{"p", "busy"}, {"q", "busy"}});
    auto one = Assignment::from_bindings(alpha, {{"p", "busy"}, {"q", "idle"}});
    // from the state where p is busy, the both-busy assignment stays excluded
    auto x = m->step(m->initial_state(), one);
    REQUIRE(x.has_value());
    CHECK(m->step(*x, both) == std::nullopt);
    CHECK(m->step(*x, one).has_value());
    CHECK(m->admissible(*x).size() == 3);
}

TEST_CASE("at_most_k latches items until their release value") {
    // Two fault/repair items over one shared variable; at most one pending.
    std::vector<VariableDecl> vars{{"s", {"-", "f1", "f2", "rep"}}};
    auto m = make_at_most_k(vars,
                            {{"s", {"f1"}, {"rep"}}, {"s", {"f2"}, {"rep"}}}, 1);
    auto alpha = m->alphabet();
    auto in = [&](const std::string& v) { return Assignment::from_bindings(alpha, {{"s", v}}); };
    auto x = m->step(m->initial_state(), in("f1"));
    REQUIRE(x.has_value());
    // another fault while f1 is pending would make two busy items
    CHECK(m->step(*x, in("f2")) == std::nullopt);
    CHECK(m->step(*x, in("-")).has_value());
    auto released = m->step(*x, in("rep"));
    REQUIRE(released.has_value());
    CHECK(m->step(*released, in("f2")).has_value());
}

TEST_CASE("dwell keeps values stable for at least dmin") {
    auto m = make_dwell({"v", {"a", "b"}}, 3);
    auto alpha = m->alphabet();
    auto in = [&](const std::string& v) { return Assignment::from_bindings(alpha, {{"v", v}}); };
    CHECK(m->step(m->initial_state(), in("a")).has_value());
    auto short_run = admissible_after(m, {in("a"), in("a")});
    REQUIRE(short_run.size() == 1); // change after 2 steps is too early
    CHECK(short_run[0].value_of("v") == "a");
    auto ok_run = admissible_after(m, {in("a"), in("a"), in("a")});
    CHECK(ok_run.size() == 2);
}

TEST_CASE("max_dwell forces a change after dmax") {
    auto m = make_max_dwell({"v", {"a", "b"}}, 2);
    auto alpha = m->alphabet();
    auto in = [&](const std::string& v) { return Assignment::from_bindings(alpha, {{"v", v}}); };
    auto stuck = admissible_after(m, {in("a"), in("a")});
    REQUIRE(stuck.size() == 1);
    CHECK(stuck[0].value_of("v") == "b");
}

TEST_CASE("no_simultaneous_change allows at most one change per step") {
    std::vector<VariableDecl> vars{{"x", {"0", "1"}}, {"y", {"0", "1"}}};
    auto m = make_no_simultaneous_change(vars);
    auto alpha = m->alphabet();
    auto in = [&](const std::string& xv, const std::string& yv) {
        return Assignment::from_bindings(alpha, {{"x", xv}, {"y", yv}});
    };
    // first step: everything allowed (nothing to compare against)
    CHECK(m->admissible(m->initial_state()).size() == 4);
    auto x = m->step(m->initial_state(), in("0", "0"));
    REQUIRE(x.has_value());
    CHECK(m->step(*x, in("1", "1")) == std::nullopt);
    CHECK(m->step(*x, in("1", "0")).has_value());
    CHECK(m->step(*x, in("0", "1")).has_value());
    CHECK(m->step(*x, in("0", "0")).has_value());
}

TEST_CASE("step_bounded stays in band, honors warmup and dwell") {
    // steps of -1/0/+1 units, band [-2, +2], hold >= 2, first 2 inputs nominal
    auto m = make_step_bounded({"v", {"dn", "0", "up"}}, {-1, 0, 1}, -2, 2, 0, 2, 2);
    auto alpha = m->alphabet();
    auto in = [&](const std::string& v) { return Assignment::from_bindings(alpha, {{"v", v}}); };
    // warmup: only zero steps
    auto w0 = m->admissible(m->initial_state());
    REQUIRE(w0.size() == 1);
    CHECK(Assignment(alpha, alpha->unrank(w0[0])).value_of("v") == "0");
    // after warmup a move is allowed
    auto after = admissible_after(m, {in("0"), in("0")});
    CHECK(after.size() == 3);
    // immediately after a move the value must hold (dwell 2)
    auto held = admissible_after(m, {in("0"), in("0"), in("up")});
    REQUIRE(held.size() == 1);
    CHECK(held[0].value_of("v") == "0");
    // at the band edge, moves outward are inadmissible
    auto edge = admissible_after(m, {in("0"), in("0"), in("up"), in("0"), in("up"), in("0")});
    CHECK(edge.size() == 2); // 'up' would leave [-2, 2]
}

TEST_CASE("value_run_window bounds unavailability runs") {
    auto m = make_value_run_window({"j", {"a", "u"}}, "u", 2, 3);
    auto alpha = m->alphabet();
    auto in = [&](const std::string& v) { return Assignment::from_bindings(alpha, {{"j", v}}); };
    // a run of a single 'u' cannot end yet
    auto one = admissible_after(m, {in("u")});
    REQUIRE(one.size() == 1);
    CHECK(one[0].value_of("j") == "u");
    // after three 'u' the run must end
    auto three = admissible_after(m, {in("u"), in("u"), in("u")});
    REQUIRE(three.size() == 1);
    CHECK(three[0].value_of("j") == "a");
    // runs of length 2 may end or continue
    CHECK(admissible_after(m, {in("u"), in("u")}).size() == 2);
}

TEST_CASE("templates are non-blocking on their own") {
    std::vector<MonitorPtr> monitors;
    monitors.push_back(make_recovery_window({"j", {"-", "f", "r"}}, "f", "r", 2, 3));
    monitors.push_back(make_recurrence({"s", {"-", "e"}}, {"e"}, 3, 6));
    monitors.push_back(make_response_window({{"a", {"0", "T"}}, {"b", {"0", "R"}}},
                                            EventSpec::value_in("a", {"T"}),
                                            EventSpec::value_in("b", {"R"}), 2, 4));
    monitors.push_back(make_at_most_k({{"p", {"i", "b"}}, {"q", {"i", "b"}}},
                                      {{"p", {"b"}, {}}, {"q", {"b"}, {}}}, 1));
    monitors.push_back(make_dwell({"v", {"a", "b"}}, 4));
    monitors.push_back(make_max_dwell({"v", {"a", "b"}}, 3));
    monitors.push_back(make_no_simultaneous_change({{"x", {"0", "1"}}, {"y", {"0", "1"}}}));
    monitors.push_back(make_step_bounded({"v", {"dn", "0", "up"}}, {-1, 0, 1}, -3, 3, 0, 2, 2));
    monitors.push_back(make_value_run_window({"j", {"a", "u"}}, "u", 2, 3));
    for (const auto& m : monitors) {
        auto sg = synthesize_sg(*m);
        CHECK(sg->pruned_states == 0);
        for (const auto& row : sg->graph.edges)
            CHECK(!row.empty());
    }
}
