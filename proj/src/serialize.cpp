#include "scengen/serialize.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace scengen::io {

namespace {

constexpr char kMagic[4] = {'S', 'G', 'E', 'N'};
constexpr std::uint8_t kFormatVersion = 1;
constexpr std::uint8_t kCountsMarker = 0x43; // 'C'

void write_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    write_u32(out, static_cast<std::uint32_t>(v & 0xffffffffULL));
    write_u32(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in)
        throw IoError("unexpected end of file");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t lo = read_u32(in);
    std::uint64_t hi = read_u32(in);
    return lo | (hi << 32);
}

} // namespace

void write_bigcount(std::ostream& out, const BigCount& value) {
    if (value < 0)
        throw DomainError("counts are non-negative");
    std::vector<std::uint8_t> bytes;
    BigCount rest = value;
    while (rest > 0) {
        bytes.push_back(static_cast<std::uint8_t>(rest & 0xff));
        rest >>= 8;
    }
    write_u32(out, static_cast<std::uint32_t>(bytes.size()));
    // stored big-endian, minimal length
    for (auto it = bytes.rbegin(); it != bytes.rend(); ++it)
        out.put(static_cast<char>(*it));
}

BigCount read_bigcount(std::istream& in) {
    std::uint32_t len = read_u32(in);
    BigCount value = 0;
    for (std::uint32_t i = 0; i < len; ++i) {
        int c = in.get();
        if (c == EOF)
            throw IoError("unexpected end of file in a big integer");
        value <<= 8;
        value |= static_cast<unsigned>(c);
    }
    return value;
}

void save_sg(const ScenarioGenerator& sg, const std::string& path, const CountTables* tables) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out.write(kMagic, 4);
    out.put(static_cast<char>(kFormatVersion));
    out.put(0);
    out.put(0);
    out.put(0);

    nlohmann::json header;
    header["kind"] = "scenario-generator";
    header["origin"] = sg.origin;
    header["states"] = sg.state_count();
    header["edges"] = sg.edge_count();
    header["pruned_states"] = sg.pruned_states;
    auto& vars = header["variables"] = nlohmann::json::array();
    for (const auto& v : sg.alphabet()->variables())
        vars.push_back({{"name", v.name}, {"domain", v.domain}});
    std::string header_text = header.dump();
    write_u32(out, static_cast<std::uint32_t>(header_text.size()));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));

    for (const auto& row : sg.graph.edges) {
        write_u32(out, static_cast<std::uint32_t>(row.size()));
        for (const auto& e : row) {
            write_u64(out, e.input);
            write_u32(out, e.succ);
        }
    }

    if (tables && tables->h_max()) {
        out.put(static_cast<char>(kCountsMarker));
        std::size_t h_max = *tables->h_max();
        write_u64(out, h_max);
        for (std::size_t k = 0; k <= h_max; ++k)
            for (std::uint32_t s = 0; s < sg.state_count(); ++s)
                write_bigcount(out, tables->ext(s, k));
    }
    if (!out)
        throw IoError("short write to '" + path + "'");
}

LoadedSg load_sg(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != std::string(kMagic, 4))
        throw IoError("'" + path + "' is not a scenario-generator file");
    int version = in.get();
    in.get();
    in.get();
    in.get();
    if (version != kFormatVersion)
        throw IoError("unsupported scenario-generator format version " +
                      std::to_string(version));

    std::uint32_t header_len = read_u32(in);
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), header_len);
    if (!in)
        throw IoError("unexpected end of file in the header");
    nlohmann::json header = nlohmann::json::parse(header_text, nullptr, false);
    if (header.is_discarded())
        throw IoError("malformed JSON header in '" + path + "'");

    std::vector<VariableDecl> vars;
    for (const auto& v : header.at("variables"))
        vars.push_back({v.at("name").get<std::string>(),
                        v.at("domain").get<std::vector<std::string>>()});

    auto sg = std::make_shared<ScenarioGenerator>();
    sg->graph.alphabet = make_alphabet(std::move(vars));
    sg->origin = header.value("origin", "");
    sg->pruned_states = header.value("pruned_states", std::size_t(0));

    std::size_t states = header.at("states").get<std::size_t>();
    sg->graph.state_keys.reserve(states);
    sg->graph.edges.reserve(states);
    for (std::uint32_t s = 0; s < states; ++s) {
        sg->graph.state_keys.push_back(GraphMonitor::key_of(s));
        std::uint32_t degree = read_u32(in);
        std::vector<Edge> row;
        row.reserve(degree);
        for (std::uint32_t e = 0; e < degree; ++e) {
            std::uint64_t input = read_u64(in);
            std::uint32_t succ = read_u32(in);
            if (succ >= states)
                throw IoError("edge target out of range in '" + path + "'");
            row.push_back(Edge{input, succ});
        }
        sg->graph.edges.push_back(std::move(row));
    }

    LoadedSg loaded;
    int marker = in.get();
    if (marker == kCountsMarker) {
        std::uint64_t h_max = read_u64(in);
        loaded.ext_columns.resize(h_max + 1);
        for (std::size_t k = 0; k <= h_max; ++k) {
            auto& column = loaded.ext_columns[k];
            column.reserve(states);
            for (std::uint32_t s = 0; s < states; ++s)
                column.push_back(read_bigcount(in));
        }
    }
    loaded.sg = std::move(sg);
    return loaded;
}

void save_tuple_manifest(const TupleManifest& manifest, const std::string& path) {
    nlohmann::json doc;
    doc["kind"] = "scenario-generator-tuple";
    doc["version"] = 1;
    doc["factors"] = manifest.factor_paths;
    doc["labels"] = manifest.labels;
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

TupleManifest load_tuple_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || doc.value("kind", "") != "scenario-generator-tuple")
        throw IoError("'" + path + "' is not a tuple manifest");
    TupleManifest manifest;
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    for (const auto& f : doc.at("factors")) {
        std::filesystem::path p = f.get<std::string>();
        manifest.factor_paths.push_back(p.is_absolute() ? p.string() : (base / p).string());
    }
    if (doc.contains("labels"))
        manifest.labels = doc.at("labels").get<std::vector<std::string>>();
    return manifest;
}

void save_cursor(const Cursor& cursor, const std::string& path) {
    nlohmann::json doc;
    doc["kind"] = "enumeration-cursor";
    doc["version"] = 1;
    doc["permutation"] = IndexPermutation::kVersion;
    doc["seed"] = cursor.seed;
    doc["horizon"] = cursor.horizon;
    doc["population"] = cursor.population.str();
    doc["position"] = cursor.position.str();
    doc["end"] = cursor.end.str();
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

Cursor load_cursor(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || doc.value("kind", "") != "enumeration-cursor")
        throw IoError("'" + path + "' is not an enumeration cursor");
    if (doc.value("permutation", "") != IndexPermutation::kVersion)
        throw IoError("cursor was written for permutation version '" +
                      doc.value("permutation", std::string("?")) + "'");
    Cursor cursor;
    cursor.seed = doc.at("seed").get<std::uint64_t>();
    cursor.horizon = doc.at("horizon").get<std::size_t>();
    cursor.population = BigCount(doc.at("population").get<std::string>());
    cursor.position = BigCount(doc.at("position").get<std::string>());
    cursor.end = BigCount(doc.at("end").get<std::string>());
    return cursor;
}

} // namespace scengen::io
