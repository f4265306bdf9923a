#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include "scengen/counting.hpp"
#include "scengen/product.hpp"

namespace scengen {

// A trace source that can count and unrank: either a single generator's
// tables or a tuple of factor generators.
class TraceSource {
public:
    explicit TraceSource(CountTables& tables) : tables_(&tables) {}
    explicit TraceSource(SGTuple& tuple) : tuple_(&tuple) {}

    const BigCount& nb_traces(std::size_t h);
    TracePrefix trace(const BigCount& i, std::size_t h);
    BigCount rank(const TracePrefix& p);

private:
    CountTables* tables_ = nullptr;
    SGTuple* tuple_ = nullptr;
};

struct SamplePolicy {
    enum class Mode { fixed_horizon, horizon_range_uniform };
    Mode mode = Mode::fixed_horizon;
    std::size_t h = 0;      // fixed_horizon
    std::size_t h_lo = 0;   // horizon_range_uniform
    std::size_t h_hi = 0;
    std::uint64_t seed = 0;
    bool with_replacement = true;
};

struct Sample {
    std::size_t horizon;
    BigCount index;
    TracePrefix prefix;
};

// Uniform random sampling of trace prefixes. Fixed-horizon mode draws
// indices uniformly over [0, nb_traces(h)). Horizon-range mode is uniform
// over the union of all prefixes with h in [h_lo, h_hi]: a horizon is chosen
// with probability proportional to its prefix count, then an index uniformly
// within it. Without replacement, draws follow the keyed index permutation
// instead of independent draws (n must not exceed the population).
// Deterministic in (seed, policy, source).
std::vector<Sample> sample_uniform(TraceSource src, const SamplePolicy& policy, std::size_t n);

// A keyed bijection of [0, N): a balanced Feistel network over
// 2*ceil(ceil(log2 N)/2) bits with cycle-walking back into [0, N).
// 8 rounds; the round function is a keyed 64-bit mix applied per half
// (chunk-wise for halves wider than 64 bits). Version "fp1": streams are
// stable across releases for a given (N, seed).
class IndexPermutation {
public:
    IndexPermutation(BigCount n, std::uint64_t seed);

    const BigCount& size() const { return n_; }
    BigCount permute(const BigCount& i) const;
    BigCount inverse(const BigCount& i) const;

    static constexpr unsigned kRounds = 8;
    static constexpr const char* kVersion = "fp1";

private:
    BigCount walk(BigCount v, bool forward) const;

    BigCount n_;
    std::uint64_t seed_;
    unsigned half_bits_;
    BigCount half_mask_;
};

// Seeded full-coverage randomized enumeration: emits every index in [0, N)
// exactly once, in keyed-permutation order. Resumable from a position
// cursor; positions [a, b) of the same (N, seed) permutation partition the
// work among parallel consumers.
class RandomEnumerator {
public:
    RandomEnumerator(TraceSource src, std::size_t h, std::uint64_t seed);
    RandomEnumerator(TraceSource src, std::size_t h, std::uint64_t seed, BigCount position,
                     BigCount end);

    bool done() const { return position_ >= end_; }
    const BigCount& position() const { return position_; }
    const BigCount& end() const { return end_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t horizon() const { return h_; }
    const BigCount& population() const { return n_; }

    Sample next();

private:
    TraceSource src_;
    std::size_t h_;
    std::uint64_t seed_;
    BigCount n_;
    IndexPermutation perm_;
    BigCount position_;
    BigCount end_;
};

struct IndexRange {
    BigCount begin;
    BigCount end;
};

// k disjoint contiguous ranges covering [0, n), sizes differing by at most 1.
std::vector<IndexRange> split_ranges(const BigCount& n, std::size_t k);

// Result of a Markovian random walk on an unpruned monitor.
struct Deadlock {
    std::size_t step; // the step at which no input was admissible
};
using WalkResult = std::variant<TracePrefix, Deadlock>;

// Baseline: at each step choose uniformly among the admissible inputs of the
// (possibly blocking) monitor itself. Reports Deadlock with the failing step
// when the walk cannot be extended before reaching h steps.
WalkResult baseline_random_walk(const Monitor& m, std::size_t h, std::uint64_t seed);

// Exact ratio between the generator's prefix count and the unpruned
// monitor's path count at horizon h. Throws DomainError when the monitor has
// no length-h computations at all.
struct Selectivity {
    BigCount numerator;
    BigCount denominator;
    double ratio() const;
};
Selectivity sg_selectivity(const ExploredGraph& unpruned, const ScenarioGenerator& sg,
                           std::size_t h);

namespace rng {

// SplitMix64-style finalizer; the keyed mixing primitive behind sampling and
// the Feistel round function.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t mix_pair(std::uint64_t a, std::uint64_t b);

// Deterministic 64-bit stream seeded with `seed`.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    // Uniform in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound);
    // Uniform BigCount in [0, bound) by rejection on ceil(log2 bound) bits.
    BigCount below_big(const BigCount& bound);

private:
    std::uint64_t state_;
};

} // namespace rng

} // namespace scengen
