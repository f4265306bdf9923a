#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "scengen/serialize.hpp"
#include "scengen/templates.hpp"

#include "oracle.hpp"

using namespace scengen;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("scengen-test-" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("big integers round-trip through the codec") {
    std::vector<BigCount> values{0, 1, 255, 256, BigCount("18446744073709551616")};
    values.push_back(BigCount(1) << 200);
    rng::Stream stream(55);
    for (int i = 0; i < 50; ++i)
        values.push_back(stream.below_big(BigCount(1) << 130));
    std::stringstream buf;
    for (const auto& v : values)
        io::write_bigcount(buf, v);
    for (const auto& v : values)
        CHECK(io::read_bigcount(buf) == v);
}

TEST_CASE("a saved scenario generator loads back with identical behavior") {
    TempDir dir;
    auto m = make_recovery_window({"j", {"-", "f", "r"}}, "f", "r", 2, 3);
    auto sg = synthesize_sg(*m);
    CountTables tables(sg->graph);
    tables.extend(12);
    io::save_sg(*sg, dir.file("jet.sg"), &tables);

    auto loaded = io::load_sg(dir.file("jet.sg"));
    CHECK(loaded.sg->state_count() == sg->state_count());
    CHECK(loaded.sg->edge_count() == sg->edge_count());
    CHECK(*loaded.sg->alphabet() == *sg->alphabet());
    CHECK(loaded.sg->graph.edges == sg->graph.edges);
    CHECK(loaded.sg->origin == sg->origin);

    REQUIRE(loaded.ext_columns.size() == 13);
    CountTables restored(loaded.sg->graph, std::move(loaded.ext_columns));
    CHECK(restored.h_max() == std::size_t(12));
    auto before = restored.rows_built();
    for (std::size_t h = 0; h <= 12; ++h)
        CHECK(restored.nb_traces(h) == tables.nb_traces(h));
    CHECK(restored.rows_built() == before); // fully preloaded, no growth
    for (BigCount i = 0; i < 20; ++i)
        CHECK(restored.trace(i, 9) == tables.trace(i, 9));
}

TEST_CASE("an SG saved without tables still counts after loading") {
    TempDir dir;
    auto m = oracle::random_monitor(5);
    ScenarioGeneratorPtr sg;
    try {
        sg = synthesize_sg(*m);
    } catch (const NoTracesError&) {
        return;
    }
    io::save_sg(*sg, dir.file("m.sg"));
    auto loaded = io::load_sg(dir.file("m.sg"));
    CHECK(loaded.ext_columns.empty());
    CountTables fresh(loaded.sg->graph);
    CountTables original(sg->graph);
    for (std::size_t h : {0, 3, 7})
        CHECK(fresh.nb_traces(h) == original.nb_traces(h));
}

TEST_CASE("tampered count sections are rejected") {
    TempDir dir;
    auto m = make_recovery_window({"j", {"-", "f", "r"}}, "f", "r", 2, 3);
    auto sg = synthesize_sg(*m);
    CountTables tables(sg->graph);
    tables.extend(4);
    io::save_sg(*sg, dir.file("jet.sg"), &tables);
    auto loaded = io::load_sg(dir.file("jet.sg"));
    loaded.ext_columns[2][0] += 1;
    CHECK_THROWS_AS(CountTables(loaded.sg->graph, std::move(loaded.ext_columns)),
                    DomainError);
}

TEST_CASE("bad magic and truncated files raise IoError") {
    TempDir dir;
    {
        std::ofstream out(dir.file("junk.sg"), std::ios::binary);
        out << "NOTASGFILE";
    }
    CHECK_THROWS_AS(io::load_sg(dir.file("junk.sg")), IoError);
    CHECK_THROWS_AS(io::load_sg(dir.file("missing.sg")), IoError);
}

TEST_CASE("tuple manifests resolve factor paths relative to themselves") {
    TempDir dir;
    auto j1 = synthesize_sg(*make_recovery_window({"a", {"-", "f", "r"}}, "f", "r", 2, 3));
    auto j2 = synthesize_sg(*make_recovery_window({"b", {"-", "f", "r"}}, "f", "r", 2, 3));
    io::save_sg(*j1, dir.file("f0.sg"));
    io::save_sg(*j2, dir.file("f1.sg"));
    io::TupleManifest manifest;
    manifest.factor_paths = {"f0.sg", "f1.sg"};
    manifest.labels = {"a", "b"};
    io::save_tuple_manifest(manifest, dir.file("pair.sgt"));

    auto loaded = io::load_tuple_manifest(dir.file("pair.sgt"));
    REQUIRE(loaded.factor_paths.size() == 2);
    std::vector<ScenarioGeneratorPtr> factors;
    for (const auto& p : loaded.factor_paths)
        factors.push_back(io::load_sg(p).sg);
    SGTuple tuple(std::move(factors));
    CountTables single(j1->graph);
    CHECK(tuple.nb_traces(4) == single.nb_traces(4) * single.nb_traces(4));
}

TEST_CASE("cursors round-trip and reject foreign files") {
    TempDir dir;
    io::Cursor cursor;
    cursor.seed = 12345;
    cursor.horizon = 40;
    cursor.population = BigCount("123456789012345678901234567890");
    cursor.position = 17;
    cursor.end = cursor.population;
    io::save_cursor(cursor, dir.file("c.cursor"));
    auto back = io::load_cursor(dir.file("c.cursor"));
    CHECK(back.seed == cursor.seed);
    CHECK(back.horizon == cursor.horizon);
    CHECK(back.population == cursor.population);
    CHECK(back.position == cursor.position);
    CHECK(back.end == cursor.end);

    io::TupleManifest manifest;
    manifest.factor_paths = {"x.sg"};
    io::save_tuple_manifest(manifest, dir.file("not-a-cursor.json"));
    CHECK_THROWS_AS(io::load_cursor(dir.file("not-a-cursor.json")), IoError);
}
