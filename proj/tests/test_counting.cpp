#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scengen/counting.hpp"
#include "scengen/errors.hpp"
#include "scengen/generator.hpp"
#include "scengen/sampling.hpp"
#include "scengen/templates.hpp"

#include "oracle.hpp"

using namespace scengen;

namespace {

MonitorPtr jet_fig2() {
    return make_recovery_window({"j", {"-", "f", "r"}}, "f", "r", 2, 3);
}

MonitorPtr loop_monitor(unsigned m) {
    VariableDecl v{"v", {}};
    for (unsigned i = 0; i < m; ++i)
        v.domain.push_back(std::string(1, static_cast<char>('a' + i)));
    auto a = make_alphabet({v});
    std::vector<FsmTransition> loops;
    for (std::uint64_t u = 0; u < m; ++u)
        loops.push_back({"s", Assignment(a, a->unrank(u)), "s"});
    return make_explicit_fsm(a, {"s"}, "s", loops, "loop");
}

} // namespace

TEST_CASE("ext base case: every state counts one empty extension") {
    auto sg = synthesize_sg(*jet_fig2());
    CountTables t(sg->graph);
    CHECK(t.nb_traces(0) == 1);
    t.extend(0);
    for (std::uint32_t s = 0; s < sg->state_count(); ++s)
        CHECK(t.ext(s, 0) == 1);
}

TEST_CASE("one state with m self-loops counts m^h") {
    auto sg = synthesize_sg(*loop_monitor(4));
    CountTables t(sg->graph);
    CHECK(t.nb_traces(5) == 1024);
    CHECK(t.nb_traces(3) == 64); // two independent binary vars at h=3 is the same count
}

TEST_CASE("jet counts match the enumeration oracle") {
    auto m = jet_fig2();
    auto sg = synthesize_sg(*m);
    CountTables t(sg->graph);
    GraphMonitor view(sg->graph, "jet");
    for (std::size_t h = 0; h <= 10; ++h)
        CHECK(t.nb_traces(h) == oracle::count_prefixes(view, h));
}

TEST_CASE("row sums equal the next ext column") {
    auto m = oracle::random_monitor(42);
    ScenarioGeneratorPtr sg;
    try {
        sg = synthesize_sg(*m);
    } catch (const NoTracesError&) {
        return;
    }
    CountTables t(sg->graph);
    t.extend(8);
    for (std::uint32_t s = 0; s < sg->state_count(); ++s) {
        for (std::size_t k = 0; k < 8; ++k) {
            const auto& row = t.prefix_row(s, k);
            REQUIRE(row.size() == sg->graph.edges[s].size() + 1);
            for (std::size_t j = 1; j < row.size(); ++j)
                CHECK(row[j - 1] <= row[j]);
            CHECK(row.back() == t.ext(s, k + 1));
        }
    }
}

TEST_CASE("trace unranks in strict lexicographic order; rank inverts it") {
    auto m = jet_fig2();
    auto sg = synthesize_sg(*m);
    CountTables t(sg->graph);
    GraphMonitor view(sg->graph, "jet");

    const std::size_t h = 6;
    auto expect = oracle::enumerate_prefixes(view, h);
    std::sort(expect.begin(), expect.end());
    REQUIRE(t.nb_traces(h) == expect.size());

    TracePrefix prev(sg->alphabet());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        auto got = t.trace(BigCount(i), h);
        std::vector<std::uint64_t> ranks;
        for (const auto& step : got.steps())
            ranks.push_back(sg->alphabet()->rank(step));
        CHECK(ranks == expect[i]);
        CHECK(t.rank(got) == i);
        if (i > 0)
            CHECK(prev < got);
        prev = got;
    }
}

TEST_CASE("trace(0) is all-first-inputs and trace(N-1) is the largest") {
    auto sg = synthesize_sg(*jet_fig2());
    CountTables t(sg->graph);
    const std::size_t h = 7;
    BigCount n = t.nb_traces(h);

    auto first = t.trace(0, h);
    StateKey x = GraphMonitor::key_of(0);
    GraphMonitor view(sg->graph, "jet");
    for (std::size_t j = 0; j < h; ++j) {
        auto inputs = view.admissible(x);
        CHECK(sg->alphabet()->rank(first.steps()[j]) == inputs.front());
        x = *view.step(x, inputs.front());
    }
    CHECK(t.rank(first) == 0);

    auto last = t.trace(n - 1, h);
    x = GraphMonitor::key_of(0);
    for (std::size_t j = 0; j < h; ++j) {
        auto inputs = view.admissible(x);
        CHECK(sg->alphabet()->rank(last.steps()[j]) == inputs.back());
        x = *view.step(x, inputs.back());
    }
}

TEST_CASE("out-of-bounds index raises the Algorithm i>=N error") {
    auto sg = synthesize_sg(*loop_monitor(2));
    CountTables t(sg->graph);
    CHECK_THROWS_WITH_AS(t.trace(BigCount(8), 3), "error index out of bounds",
                         OutOfBoundsError);
    CHECK_NOTHROW(t.trace(BigCount(7), 3));
}

TEST_CASE("rank rejects prefixes through pruned edges") {
    // dead-end branch: A ->y D is pruned from the SG
    auto a = make_alphabet({VariableDecl{"v", {"x", "y"}}});
    auto in = [&](const std::string& v) { return Assignment::from_bindings(a, {{"v", v}}); };
    auto m = make_explicit_fsm(a, {"A", "B", "D"}, "A",
                               {{"A", in("x"), "B"},
                                {"A", in("y"), "D"},
                                {"B", in("x"), "A"}},
                               "deadend");
    auto sg = synthesize_sg(*m);
    CountTables t(sg->graph);
    TracePrefix p(sg->alphabet());
    p.append(Assignment::from_bindings(sg->alphabet(), {{"v", "y"}}));
    try {
        t.rank(p);
        FAIL("expected InvalidPrefixError");
    } catch (const InvalidPrefixError& e) {
        CHECK(e.step() == 0);
    }
}

TEST_CASE("rank/trace round-trip on random indices at h=50") {
    auto sg = synthesize_sg(*jet_fig2());
    CountTables t(sg->graph);
    const std::size_t h = 50;
    BigCount n = t.nb_traces(h);
    rng::Stream stream(2024);
    for (int i = 0; i < 1000; ++i) {
        BigCount idx = stream.below_big(n);
        auto p = t.trace(idx, h);
        CHECK(t.rank(p) == idx);
        CHECK(p.length() == h);
    }
}

TEST_CASE("counts never decrease with the horizon on a generator") {
    for (std::uint64_t seed : {1u, 9u, 77u}) {
        ScenarioGeneratorPtr sg;
        try {
            sg = synthesize_sg(*oracle::random_monitor(seed));
        } catch (const NoTracesError&) {
            continue;
        }
        CountTables t(sg->graph);
        BigCount prev = t.nb_traces(0);
        for (std::size_t h = 1; h <= 12; ++h) {
            const auto& cur = t.nb_traces(h);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("tables extend incrementally and reads cause no growth") {
    auto sg = synthesize_sg(*jet_fig2());
    CountTables t(sg->graph);
    t.extend(10);
    auto rows = t.rows_built();
    t.extend(10);
    t.extend(4);
    CHECK(t.rows_built() == rows);

    // reads at covered horizons never grow the tables
    for (int i = 0; i < 100; ++i) {
        t.nb_traces(10);
        t.trace(BigCount(i % 3), 10);
    }
    CHECK(t.rows_built() == rows);

    // growth is exactly one column per new horizon
    t.extend(12);
    CHECK(t.rows_built() == rows + 2 * sg->state_count());
}

TEST_CASE("table memory limit raises a resource error") {
    auto sg = synthesize_sg(*loop_monitor(6));
    CountTablesConfig config;
    config.memory_limit_bytes = 512;
    CountTables t(sg->graph, config);
    CHECK_THROWS_AS(t.extend(64), ResourceLimitError);
}

TEST_CASE("count_paths agrees with the tables on raw graphs") {
    for (std::uint64_t seed : {21u, 23u}) {
        auto m = oracle::random_monitor(seed);
        auto g = explore(*m);
        CountTables t(g);
        for (std::size_t h : {0, 1, 5, 9})
            CHECK(count_paths(g, h) == t.nb_traces(h));
    }
}

TEST_CASE("recurrence conjoined with recovery matches brute force at h=25") {
    // sensor s fails every 15-20 t.u. and each fault is repaired within 3-5
    VariableDecl s{"s", {"-", "f", "r"}};
    auto recur = make_recurrence(s, {"f"}, 15, 20);
    auto recov = make_recovery_window(s, "f", "r", 3, 5);
    auto m = conjoin(recur, recov);
    auto sg = synthesize_sg(*m);
    CountTables t(sg->graph);
    GraphMonitor view(sg->graph, "sg");
    CHECK(t.nb_traces(25) == oracle::count_prefixes(view, 25));
    CHECK(t.nb_traces(25) > 0);
}
