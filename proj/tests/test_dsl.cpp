#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "scengen/counting.hpp"
#include "scengen/dsl.hpp"
#include "scengen/generator.hpp"
#include "scengen/product.hpp"

#include "oracle.hpp"

using namespace scengen;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kMinimal = R"(#! scengen-dsl v1
var v in { a, b }
monitor m fsm {
  state s initial;
  on v=a from s to s;
  on v=b from s to s;
}
scenario = m
)";

bool has_error_code(const std::vector<dsl::Diagnostic>& diagnostics, const std::string& code) {
    for (const auto& d : diagnostics)
        if (d.code == code && d.severity == dsl::Diagnostic::Severity::error)
            return true;
    return false;
}

} // namespace

TEST_CASE("a minimal spec parses and compiles to one self-loop monitor") {
    auto parsed = dsl::parse(kMinimal);
    REQUIRE(parsed.ok());
    CHECK(parsed.spec.version == "v1");
    auto compiled = dsl::compile(parsed.spec);
    REQUIRE(compiled.ok());
    REQUIRE(compiled.factors.size() == 1);
    auto sg = synthesize_sg(*compiled.factors[0].monitor);
    CHECK(sg->state_count() == 1);
    CHECK(sg->edge_count() == 2);
}

TEST_CASE("every diagnostic carries a location") {
    const char* bad = R"(#! scengen-dsl v1
var v in { a, b }
monitor broken fsm {
  state s initial
  on v=a from s to s;
}
scenario = broken
)";
    auto parsed = dsl::parse(bad);
    CHECK(!parsed.ok());
    REQUIRE(!parsed.diagnostics.empty());
    for (const auto& d : parsed.diagnostics) {
        CHECK(d.loc.line > 0);
        CHECK(d.loc.col > 0);
    }
}

TEST_CASE("unknown monitor in the composition is a located diagnostic") {
    const char* text = R"(#! scengen-dsl v1
var v in { a, b }
monitor m fsm {
  state s initial;
  on v=a from s to s;
}
scenario = m & ghost
)";
    auto parsed = dsl::parse(text);
    REQUIRE(parsed.ok());
    auto compiled = dsl::compile(parsed.spec);
    CHECK(!compiled.ok());
    CHECK(has_error_code(compiled.diagnostics, "unknown-monitor"));
}

TEST_CASE("parse flags duplicates and unknown templates") {
    const char* text = R"(#! scengen-dsl v1
var v in { a, b }
var v in { c }
monitor m = frobnicate(v, 3)
monitor m = dwell(v, 2)
scenario = m
)";
    auto parsed = dsl::parse(text);
    CHECK(has_error_code(parsed.diagnostics, "dup-def"));
    auto compiled = dsl::compile(parsed.spec);
    CHECK(has_error_code(compiled.diagnostics, "unknown-template"));
}

TEST_CASE("nondeterministic fsm tables are rejected with the offending entry") {
    const char* text = R"(#! scengen-dsl v1
var v in { a, b }
monitor m fsm {
  state s initial;
  state t;
  on v=a from s to s;
  on v=a from s to t;
  on v=b from s to s;
  on v=a from t to t;
  on v=b from t to t;
}
scenario = m
)";
    auto parsed = dsl::parse(text);
    REQUIRE(parsed.ok());
    auto compiled = dsl::compile(parsed.spec);
    CHECK(!compiled.ok());
    CHECK(has_error_code(compiled.diagnostics, "nondet-fsm"));
}

TEST_CASE("wildcard patterns expand over omitted variables") {
    const char* text = R"(#! scengen-dsl v1
var x in { 0, 1 }
var y in { 0, 1 }
monitor m fsm {
  state s initial;
  state t;
  on x=0 from s to s;
  on x=1, y=0 from s to t;
  on y=1 from t to t;
  on x=0, y=0 from t to s;
}
scenario = m
)";
    auto parsed = dsl::parse(text);
    REQUIRE(parsed.ok());
    auto compiled = dsl::compile(parsed.spec);
    REQUIRE(compiled.ok());
    const auto& m = compiled.factors[0].monitor;
    // state s: x=0 expands over y (2 inputs) + the explicit (1,0)
    CHECK(m->admissible(m->initial_state()).size() == 3);
}

TEST_CASE("pretty-print round-trips to an identical canonical form") {
    for (const std::string path : {"fcs.mon", "bdc.mon", "alma.mon"}) {
        auto text = slurp(std::string(CASESTUDY_DIR) + "/" + path);
        auto first = dsl::parse(text);
        REQUIRE(first.ok());
        auto printed = dsl::pretty_print(first.spec);
        auto second = dsl::parse(printed);
        REQUIRE(second.ok());
        CHECK(dsl::pretty_print(second.spec) == printed);
    }
}

TEST_CASE("disjoint templates become separate factors, shared ones conjoin") {
    const char* text = R"(#! scengen-dsl v1
var p in { 0, 1 }
var q in { 0, 1 }
monitor mp = max_dwell(p, 3)
monitor mq = max_dwell(q, 4)
monitor both = at_most_k(1, p in { 1 }, q in { 1 })
group free = mp & mq
scenario = mp & mq
)";
    auto parsed = dsl::parse(text);
    REQUIRE(parsed.ok());
    auto two = dsl::compile(parsed.spec);
    REQUIRE(two.ok());
    CHECK(two.factors.size() == 2);

    auto one = dsl::compile_selection(parsed.spec, {"mp", "mq", "both"});
    REQUIRE(one.ok());
    CHECK(one.factors.size() == 1);
    CHECK(one.factors[0].members.size() == 3);
}

TEST_CASE("compilation is deterministic") {
    auto text = slurp(std::string(CASESTUDY_DIR) + "/fcs.mon");
    auto a = dsl::parse(text);
    auto b = dsl::parse(text);
    REQUIRE(a.ok());
    auto ca = dsl::compile(a.spec);
    auto cb = dsl::compile(b.spec);
    REQUIRE(ca.ok());
    REQUIRE(cb.ok());
    REQUIRE(ca.factors.size() == cb.factors.size());
    for (std::size_t i = 0; i < ca.factors.size(); ++i) {
        auto ga = explore(*ca.factors[i].monitor);
        auto gb = explore(*cb.factors[i].monitor);
        CHECK(ga.state_keys == gb.state_keys);
        CHECK(ga.edges == gb.edges);
    }
}

TEST_CASE("the FCS file parses to its template instantiations and compiles") {
    auto text = slurp(std::string(CASESTUDY_DIR) + "/fcs.mon");
    auto parsed = dsl::parse(text);
    REQUIRE(parsed.ok());
    int recovery = 0, recurrence = 0, response = 0, amk = 0, fsm = 0;
    for (const auto& m : parsed.spec.monitors) {
        if (m.is_fsm)
            ++fsm;
        else if (m.call.name == "recovery_window")
            ++recovery;
        else if (m.call.name == "recurrence")
            ++recurrence;
        else if (m.call.name == "response_window")
            ++response;
        else if (m.call.name == "at_most_k")
            ++amk;
    }
    CHECK(recovery == 4);
    CHECK(recurrence == 4);
    CHECK(response == 5);
    CHECK(amk == 1);
    CHECK(fsm == 1);

    auto compiled = dsl::compile(parsed.spec);
    REQUIRE(compiled.ok());
    REQUIRE(compiled.factors.size() == 1); // everything shares the variable s
    CHECK(compiled.factors[0].monitor->alphabet()->size() == 6);
    auto sg = synthesize_sg(*compiled.factors[0].monitor);
    CHECK(sg->state_count() > 0);
}

TEST_CASE("the ALMA scenario compiles to the 108-input coupled factor") {
    auto text = slurp(std::string(CASESTUDY_DIR) + "/alma.mon");
    auto parsed = dsl::parse(text);
    REQUIRE(parsed.ok());
    auto compiled = dsl::compile(parsed.spec);
    REQUIRE(compiled.ok());
    REQUIRE(compiled.factors.size() == 1);
    CHECK(compiled.factors[0].monitor->alphabet()->size() == 108);

    // the 19 independent assumption monitors factor fully
    std::vector<std::string> names{"rot_y", "rot_r", "rot_p"};
    for (int i = 1; i <= 16; ++i)
        names.push_back("jet" + std::to_string(i));
    auto tuple_factors = dsl::compile_selection(parsed.spec, names);
    REQUIRE(tuple_factors.ok());
    CHECK(tuple_factors.factors.size() == 19);
    BigCount combined = 1;
    for (const auto& f : tuple_factors.factors)
        combined *= f.monitor->alphabet()->size();
    CHECK(combined == 1769472);
}

TEST_CASE("the BDC scenario compiles and keeps Vi/R coupled through c5") {
    auto text = slurp(std::string(CASESTUDY_DIR) + "/bdc.mon");
    auto parsed = dsl::parse(text);
    REQUIRE(parsed.ok());
    auto compiled = dsl::compile(parsed.spec);
    REQUIRE(compiled.ok());
    REQUIRE(compiled.factors.size() == 1);
    CHECK(compiled.factors[0].monitor->alphabet()->size() == 25);

    auto apart = dsl::compile_selection(parsed.spec, {"a_vi", "a_r"});
    REQUIRE(apart.ok());
    CHECK(apart.factors.size() == 2);
    CHECK(apart.factors[0].monitor->alphabet()->size() == 5);
}

TEST_CASE("factorized and conjoined compilations entail the same traces") {
    const char* text = R"(#! scengen-dsl v1
var p in { 0, 1 }
var q in { x, y, z }
monitor mp = max_dwell(p, 2)
monitor mq = value_run_window(q, x, 1, 2)
scenario = mp & mq
)";
    auto parsed = dsl::parse(text);
    REQUIRE(parsed.ok());
    auto compiled = dsl::compile(parsed.spec);
    REQUIRE(compiled.ok());
    REQUIRE(compiled.factors.size() == 2);

    SGTuple tuple({synthesize_sg(*compiled.factors[0].monitor),
                   synthesize_sg(*compiled.factors[1].monitor)});
    auto whole = synthesize_sg(
        *conjoin(compiled.factors[0].monitor, compiled.factors[1].monitor));
    GraphMonitor view(whole->graph, "whole");
    for (std::size_t h = 0; h <= 6; ++h) {
        CountTables t(whole->graph);
        CHECK(tuple.nb_traces(h) == t.nb_traces(h));
    }
    // set equality at h=4 via sorted enumeration
    auto raw = oracle::enumerate_prefixes(view, 4);
    std::set<std::vector<std::vector<std::uint32_t>>> whole_set;
    for (const auto& p : raw) {
        std::vector<std::vector<std::uint32_t>> steps;
        for (auto r : p)
            steps.push_back(whole->alphabet()->unrank(r));
        whole_set.insert(steps);
    }
    std::set<std::vector<std::vector<std::uint32_t>>> tuple_set;
    BigCount n = tuple.nb_traces(4);
    for (BigCount i = 0; i < n; ++i)
        tuple_set.insert(tuple.trace(i, 4).steps());
    CHECK(tuple_set == whole_set);
}
