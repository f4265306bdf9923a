#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scengen/counting.hpp"
#include "scengen/errors.hpp"
#include "scengen/generator.hpp"
#include "scengen/sampling.hpp"

namespace scengen {

// File I/O failed (missing file, short read, bad magic).
class IoError : public Error {
public:
    using Error::Error;
};

namespace io {

// Scenario-generator container (.sg): an 8-byte magic/version header, a JSON
// header (alphabet, state count, edge count, origin), a packed little-endian
// edge array, and an optional counts section (the ext table up to its
// h_max; prefix-sum rows are rebuilt on load). Layout details in
// docs/formats.md; the byte layout is fixed and versioned.
void save_sg(const ScenarioGenerator& sg, const std::string& path,
             const CountTables* tables = nullptr);

struct LoadedSg {
    ScenarioGeneratorPtr sg;
    // Preloaded ext columns when the file carries a counts section
    // (ext_columns[k][state]); empty otherwise.
    std::vector<std::vector<BigCount>> ext_columns;
};
LoadedSg load_sg(const std::string& path);

// Tuple manifest (.sgt): JSON text referencing the factor SG files in digit
// order. Relative paths resolve against the manifest's directory.
struct TupleManifest {
    std::vector<std::string> factor_paths;
    std::vector<std::string> labels;
};
void save_tuple_manifest(const TupleManifest& manifest, const std::string& path);
TupleManifest load_tuple_manifest(const std::string& path);

// Exact big-integer codec: u32 little-endian byte length, then the
// minimal-length big-endian magnitude (length 0 encodes zero).
void write_bigcount(std::ostream& out, const BigCount& value);
BigCount read_bigcount(std::istream& in);

// Resumable-enumeration checkpoint, as a small versioned JSON record.
struct Cursor {
    std::uint64_t seed = 0;
    std::size_t horizon = 0;
    BigCount population;
    BigCount position;
    BigCount end;
};
void save_cursor(const Cursor& cursor, const std::string& path);
Cursor load_cursor(const std::string& path);

} // namespace io
} // namespace scengen
