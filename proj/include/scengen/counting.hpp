#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "scengen/graph.hpp"

namespace scengen {

// Exact non-negative integer count. Trace counts routinely exceed any fixed
// word size, so all counting is arbitrary precision.
using BigCount = boost::multiprecision::cpp_int;

struct CountTablesConfig {
    // Rough cap on table storage; exceeding it raises ResourceLimitError.
    std::size_t memory_limit_bytes = std::size_t(8) << 30;
};

// Extension-count tables over an explored graph (usually a scenario
// generator's pruned graph).
//
//   ext(x, 0) = 1
//   ext(x, k) = sum over edges (x -u-> x') of ext(x', k-1)
//
// For each (state, k) the running prefix sums of ext over the state's ordered
// edge list are kept as a row of out-degree+1 entries; entry j is the number
// of length-(k+1) paths from x that start with an edge strictly below edge j,
// and the final entry equals ext(x, k+1). Unranking walks these rows by
// binary search.
//
// Extension is single-writer and never recomputes an existing column. After
// extend(h), all reads at horizons <= h are const and safe for any number of
// concurrent callers.
class CountTables {
public:
    explicit CountTables(const ExploredGraph& graph, CountTablesConfig config = {});

    // Restores persisted ext columns (ext_columns[k][state], k = 0..h_max).
    // Prefix-sum rows are rebuilt and checked against the stored columns;
    // inconsistent data raises DomainError.
    CountTables(const ExploredGraph& graph, std::vector<std::vector<BigCount>> ext_columns,
                CountTablesConfig config = {});

    const ExploredGraph& graph() const { return graph_; }

    // Highest tabulated horizon; empty until the first extension.
    std::optional<std::size_t> h_max() const { return h_max_; }

    // Ensures tables cover all horizons <= h.
    void extend(std::size_t h);

    const BigCount& ext(std::uint32_t state, std::size_t k) const;
    const std::vector<BigCount>& prefix_row(std::uint32_t state, std::size_t k) const;

    // Number of distinct length-h prefixes from the initial state. Extends
    // the tables when needed; amortized O(1) afterwards.
    const BigCount& nb_traces(std::size_t h);

    // The i-th (in lexicographic order) length-h prefix. O(h log deg) with
    // tables built. Throws OutOfBoundsError when i >= nb_traces(h).
    TracePrefix trace(const BigCount& i, std::size_t h);

    // Exact inverse of trace(): the lexicographic index of a valid prefix.
    // Throws InvalidPrefixError naming the first offending step.
    BigCount rank(const TracePrefix& p);

    // Instrumentation: total (state, k) rows built so far. Repeated queries
    // at already-covered horizons must not grow this.
    std::uint64_t rows_built() const { return rows_built_; }
    std::size_t approx_bytes() const { return approx_bytes_; }

private:
    const ExploredGraph& graph_;
    CountTablesConfig config_;
    std::optional<std::size_t> h_max_;
    std::vector<std::vector<BigCount>> ext_;                // ext_[k][state]
    std::vector<std::vector<std::vector<BigCount>>> rows_;  // rows_[k][state]: prefix sums
    std::uint64_t rows_built_ = 0;
    std::size_t approx_bytes_ = 0;
};

// Streaming path count: ext(x0, h) computed with two rolling columns and no
// retained tables. Used where only counts are needed (e.g. selectivity
// denominators on large unpruned graphs).
BigCount count_paths(const ExploredGraph& g, std::size_t h);

} // namespace scengen
