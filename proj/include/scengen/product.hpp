#pragma once

#include <memory>
#include <vector>

#include "scengen/counting.hpp"
#include "scengen/generator.hpp"

namespace scengen {

// Pointwise pairing of two equal-length prefixes over disjoint variable sets:
// each step becomes the union of the two step assignments, a's variables
// first.
TracePrefix pair_traces(const TracePrefix& a, const TracePrefix& b);

// An SG over independent sub-monitors, kept as a tuple of factor SGs so the
// product is never materialized. Factor order is fixed and defines the
// mixed-radix digit order of indices (first factor = most significant) as
// well as the combined variable order (first factor's variables first).
//
// Counting and unranking follow the product rule: the combined count is the
// product of factor counts, and index i selects one prefix per factor by
// mixed-radix decomposition, pairing them pointwise.
//
// Order contract: indices enumerate pairs factor-major, i.e. traces are
// ordered by (first factor's whole prefix, then the next factor's, ...),
// each block in its factor's lexicographic order. For h >= 2 this differs
// from the step-interleaved lexicographic order of the materialized conjoint
// monitor (the first factor's step 1 outranks later factors' step 0 here).
// trace() and rank() are mutual inverses for this order, and the emitted
// prefix set is exactly the conjoint monitor's prefix set.
//
// Like CountTables, horizon extension is single-writer; reads at covered
// horizons are safe for concurrent callers.
class SGTuple {
public:
    explicit SGTuple(std::vector<ScenarioGeneratorPtr> factors,
                     CountTablesConfig config = {});

    std::size_t factor_count() const { return factors_.size(); }
    const ScenarioGeneratorPtr& factor(std::size_t i) const { return factors_.at(i); }
    CountTables& factor_tables(std::size_t i) { return *tables_.at(i); }

    // Combined alphabet: concatenation of the factor alphabets.
    const AlphabetPtr& alphabet() const { return alphabet_; }

    const BigCount& nb_traces(std::size_t h);
    TracePrefix trace(const BigCount& i, std::size_t h);
    BigCount rank(const TracePrefix& p);

private:
    std::vector<ScenarioGeneratorPtr> factors_;
    std::vector<std::unique_ptr<CountTables>> tables_;
    AlphabetPtr alphabet_;
    std::vector<BigCount> cached_totals_; // by horizon
};

} // namespace scengen
