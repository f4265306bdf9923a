#include "scengen/sampling.hpp"

#include <cmath>

#include "scengen/errors.hpp"

namespace scengen {

namespace rng {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_pair(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

std::uint64_t Stream::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t Stream::below(std::uint64_t bound) {
    if (bound == 0)
        throw DomainError("cannot draw below zero");
    if (bound == 1)
        return 0;
    // Rejection on the smallest covering power of two: no modulo bias.
    unsigned bits = 64 - static_cast<unsigned>(__builtin_clzll(bound - 1));
    std::uint64_t mask = bits >= 64 ? ~0ULL : ((1ULL << bits) - 1);
    for (;;) {
        std::uint64_t v = next() & mask;
        if (v < bound)
            return v;
    }
}

BigCount Stream::below_big(const BigCount& bound) {
    if (bound <= 0)
        throw DomainError("cannot draw below a non-positive bound");
    if (bound == 1)
        return 0;
    std::size_t bits = boost::multiprecision::msb(bound - 1) + 1;
    std::size_t words = (bits + 63) / 64;
    unsigned top_bits = static_cast<unsigned>(bits - (words - 1) * 64);
    std::uint64_t top_mask = top_bits >= 64 ? ~0ULL : ((1ULL << top_bits) - 1);
    for (;;) {
        BigCount v = 0;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t word = next();
            if (w == 0)
                word &= top_mask;
            v <<= 64;
            v |= word;
        }
        if (v < bound)
            return v;
    }
}

} // namespace rng

const BigCount& TraceSource::nb_traces(std::size_t h) {
    return tables_ ? tables_->nb_traces(h) : tuple_->nb_traces(h);
}

TracePrefix TraceSource::trace(const BigCount& i, std::size_t h) {
    return tables_ ? tables_->trace(i, h) : tuple_->trace(i, h);
}

BigCount TraceSource::rank(const TracePrefix& p) {
    return tables_ ? tables_->rank(p) : tuple_->rank(p);
}

namespace {

struct HorizonTable {
    std::vector<std::size_t> horizons;
    std::vector<BigCount> cumulative; // cumulative[i] = sum of counts before horizon i
    BigCount total = 0;
};

HorizonTable horizon_table(TraceSource& src, const SamplePolicy& policy) {
    HorizonTable t;
    std::size_t lo = policy.mode == SamplePolicy::Mode::fixed_horizon ? policy.h : policy.h_lo;
    std::size_t hi = policy.mode == SamplePolicy::Mode::fixed_horizon ? policy.h : policy.h_hi;
    if (lo > hi)
        throw DomainError("sample policy: empty horizon range");
    for (std::size_t h = lo; h <= hi; ++h) {
        t.horizons.push_back(h);
        t.cumulative.push_back(t.total);
        t.total += src.nb_traces(h);
    }
    if (t.total == 0)
        throw NoTracesError("the generator has no prefixes in the requested horizon range");
    return t;
}

Sample locate(TraceSource& src, const HorizonTable& t, const BigCount& offset) {
    // Find the last horizon whose cumulative start is <= offset.
    std::size_t idx = t.horizons.size() - 1;
    for (std::size_t i = 1; i < t.cumulative.size(); ++i) {
        if (t.cumulative[i] > offset) {
            idx = i - 1;
            break;
        }
    }
    BigCount index = offset - t.cumulative[idx];
    std::size_t h = t.horizons[idx];
    return Sample{h, index, src.trace(index, h)};
}

} // namespace

std::vector<Sample> sample_uniform(TraceSource src, const SamplePolicy& policy, std::size_t n) {
    auto table = horizon_table(src, policy);
    std::vector<Sample> out;
    out.reserve(n);
    if (policy.with_replacement) {
        rng::Stream stream(rng::mix_pair(policy.seed, 0x73616d706c65ULL));
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(locate(src, table, stream.below_big(table.total)));
    } else {
        if (BigCount(n) > table.total)
            throw DomainError("cannot sample " + std::to_string(n) +
                              " prefixes without replacement from a population of " +
                              table.total.str());
        IndexPermutation perm(table.total, policy.seed);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(locate(src, table, perm.permute(i)));
    }
    return out;
}

IndexPermutation::IndexPermutation(BigCount n, std::uint64_t seed)
    : n_(std::move(n)), seed_(seed) {
    if (n_ <= 0)
        throw DomainError("index permutation needs a positive population");
    std::size_t bits = n_ == 1 ? 1 : boost::multiprecision::msb(n_ - 1) + 1;
    half_bits_ = static_cast<unsigned>((bits + 1) / 2);
    half_mask_ = (BigCount(1) << half_bits_) - 1;
}

namespace {

// Keyed round value for one half, produced 64 bits at a time.
BigCount round_value(const BigCount& half, unsigned half_bits, std::uint64_t seed,
                     unsigned round) {
    // Fold the half into 64 bits chunk-wise.
    std::uint64_t fold = rng::mix_pair(seed, round);
    BigCount rest = half;
    while (rest > 0) {
        std::uint64_t chunk = static_cast<std::uint64_t>(rest & 0xffffffffffffffffULL);
        fold = rng::mix_pair(fold, chunk);
        rest >>= 64;
    }
    if (half_bits <= 64) {
        std::uint64_t v = rng::mix_pair(fold, 0x666569737465ULL);
        if (half_bits < 64)
            v &= (1ULL << half_bits) - 1;
        return BigCount(v);
    }
    std::size_t words = (half_bits + 63) / 64;
    BigCount out = 0;
    for (std::size_t w = 0; w < words; ++w) {
        out <<= 64;
        out |= rng::mix_pair(fold, 0x666569737465ULL + w);
    }
    return out & ((BigCount(1) << half_bits) - 1);
}

} // namespace

BigCount IndexPermutation::walk(BigCount v, bool forward) const {
    if (n_ == 1)
        return 0;
    do {
        BigCount left = v >> half_bits_;
        BigCount right = v & half_mask_;
        if (forward) {
            for (unsigned r = 0; r < kRounds; ++r) {
                BigCount f = round_value(right, half_bits_, seed_, r);
                BigCount new_right = (left ^ f) & half_mask_;
                left = right;
                right = new_right;
            }
        } else {
            for (unsigned r = kRounds; r-- > 0;) {
                BigCount f = round_value(left, half_bits_, seed_, r);
                BigCount new_left = (right ^ f) & half_mask_;
                right = left;
                left = new_left;
            }
        }
        v = (left << half_bits_) | right;
    } while (v >= n_);
    return v;
}

BigCount IndexPermutation::permute(const BigCount& i) const {
    if (i < 0 || i >= n_)
        throw OutOfBoundsError("permutation input outside [0, N)");
    return walk(i, true);
}

BigCount IndexPermutation::inverse(const BigCount& i) const {
    if (i < 0 || i >= n_)
        throw OutOfBoundsError("permutation input outside [0, N)");
    return walk(i, false);
}

RandomEnumerator::RandomEnumerator(TraceSource src, std::size_t h, std::uint64_t seed)
    : src_(src), h_(h), seed_(seed), n_(src_.nb_traces(h)), perm_(n_ > 0 ? n_ : 1, seed),
      position_(0), end_(n_) {
    if (n_ < 1)
        throw NoTracesError("the generator has no prefixes at horizon " + std::to_string(h));
}

RandomEnumerator::RandomEnumerator(TraceSource src, std::size_t h, std::uint64_t seed,
                                   BigCount position, BigCount end)
    : src_(src), h_(h), seed_(seed), n_(src_.nb_traces(h)), perm_(n_ > 0 ? n_ : 1, seed),
      position_(std::move(position)), end_(std::move(end)) {
    if (n_ < 1)
        throw NoTracesError("the generator has no prefixes at horizon " + std::to_string(h));
    if (position_ < 0 || end_ > n_ || position_ > end_)
        throw OutOfBoundsError("enumeration range outside [0, N]");
}

Sample RandomEnumerator::next() {
    if (done())
        throw OutOfBoundsError("enumeration exhausted");
    BigCount index = perm_.permute(position_);
    ++position_;
    return Sample{h_, index, src_.trace(index, h_)};
}

std::vector<IndexRange> split_ranges(const BigCount& n, std::size_t k) {
    if (k < 1)
        throw DomainError("split_ranges needs at least one range");
    if (n < 0)
        throw DomainError("split_ranges needs a non-negative population");
    BigCount base = n / k;
    BigCount extra = n % k;
    std::vector<IndexRange> out;
    out.reserve(k);
    BigCount at = 0;
    for (std::size_t i = 0; i < k; ++i) {
        BigCount len = base + (BigCount(i) < extra ? 1 : 0);
        out.push_back(IndexRange{at, at + len});
        at += len;
    }
    return out;
}

WalkResult baseline_random_walk(const Monitor& m, std::size_t h, std::uint64_t seed) {
    rng::Stream stream(rng::mix_pair(seed, 0x77616c6bULL));
    TracePrefix prefix(m.alphabet());
    StateKey state = m.initial_state();
    for (std::size_t t = 0; t < h; ++t) {
        auto inputs = m.admissible(state);
        if (inputs.empty())
            return Deadlock{t};
        std::uint64_t pick = inputs[stream.below(inputs.size())];
        prefix.append_rank(pick);
        state = *m.step(state, pick);
    }
    return prefix;
}

double Selectivity::ratio() const {
    // Fixed-point division: exact to well below double precision.
    BigCount scaled = (numerator << 64) / denominator;
    return std::ldexp(scaled.convert_to<double>(), -64);
}

Selectivity sg_selectivity(const ExploredGraph& unpruned, const ScenarioGenerator& sg,
                           std::size_t h) {
    if (h < 1)
        throw DomainError("sg_selectivity needs a positive horizon");
    Selectivity s;
    s.denominator = count_paths(unpruned, h);
    if (s.denominator == 0)
        throw DomainError("the monitor has no length-" + std::to_string(h) +
                          " computations; selectivity is undefined");
    s.numerator = count_paths(sg.graph, h);
    return s;
}

} // namespace scengen
