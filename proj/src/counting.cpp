#include "scengen/counting.hpp"

#include <algorithm>

#include "scengen/errors.hpp"

namespace scengen {

namespace {

std::size_t approx_bigcount_bytes(const BigCount& v) {
    std::size_t bits = v.is_zero() ? 0 : boost::multiprecision::msb(v) + 1;
    return sizeof(BigCount) + (bits > 128 ? ((bits + 63) / 64) * 8 : 0);
}

} // namespace

CountTables::CountTables(const ExploredGraph& graph, CountTablesConfig config)
    : graph_(graph), config_(config) {
    if (graph_.state_count() == 0)
        throw DomainError("counting tables need a non-empty graph");
}

CountTables::CountTables(const ExploredGraph& graph,
                         std::vector<std::vector<BigCount>> ext_columns,
                         CountTablesConfig config)
    : CountTables(graph, config) {
    if (ext_columns.empty())
        return;
    const std::size_t n = graph_.state_count();
    const std::size_t h_max = ext_columns.size() - 1;
    for (const auto& column : ext_columns)
        if (column.size() != n)
            throw DomainError("stored count column does not match the graph's state count");
    for (const auto& e : ext_columns[0])
        if (e != 1)
            throw DomainError("stored base column must be all ones");
    ext_ = std::move(ext_columns);
    // Rebuild the prefix-sum rows and cross-check them against the stored
    // columns.
    rows_.reserve(h_max);
    for (std::size_t k = 0; k < h_max; ++k) {
        std::vector<std::vector<BigCount>> rows(n);
        for (std::uint32_t s = 0; s < n; ++s) {
            auto& row = rows[s];
            row.reserve(graph_.edges[s].size() + 1);
            BigCount acc = 0;
            row.push_back(acc);
            for (const auto& e : graph_.edges[s]) {
                acc += ext_[k][e.succ];
                row.push_back(acc);
            }
            if (row.back() != ext_[k + 1][s])
                throw DomainError("stored counts are inconsistent with the graph at horizon " +
                                  std::to_string(k + 1));
        }
        rows_.push_back(std::move(rows));
        rows_built_ += n;
    }
    rows_built_ += n; // the base column
    h_max_ = h_max;
}

void CountTables::extend(std::size_t h) {
    const std::size_t n = graph_.state_count();
    if (!h_max_) {
        ext_.emplace_back(n, BigCount(1));
        rows_built_ += n;
        approx_bytes_ += n * sizeof(BigCount);
        h_max_ = 0;
    }
    while (*h_max_ < h) {
        std::size_t k = *h_max_; // building rows_[k] and ext_[k+1]
        const auto& prev = ext_[k];
        std::vector<std::vector<BigCount>> rows(n);
        std::vector<BigCount> next(n);
        std::size_t col_bytes = 0;
        for (std::uint32_t s = 0; s < n; ++s) {
            const auto& out = graph_.edges[s];
            auto& row = rows[s];
            row.reserve(out.size() + 1);
            BigCount acc = 0;
            row.push_back(acc);
            for (const auto& e : out) {
                acc += prev[e.succ];
                row.push_back(acc);
            }
            next[s] = row.back();
            for (const auto& v : row)
                col_bytes += approx_bigcount_bytes(v);
            col_bytes += approx_bigcount_bytes(next[s]);
        }
        approx_bytes_ += col_bytes;
        if (approx_bytes_ > config_.memory_limit_bytes)
            throw ResourceLimitError(
                "counting tables exceed the memory limit (" +
                std::to_string(approx_bytes_) + " of " +
                std::to_string(config_.memory_limit_bytes) +
                " bytes at horizon " + std::to_string(k + 1) +
                "); raise the limit, or use count_paths for per-horizon counts");
        rows_.push_back(std::move(rows));
        ext_.push_back(std::move(next));
        rows_built_ += n;
        h_max_ = k + 1;
    }
}

const BigCount& CountTables::ext(std::uint32_t state, std::size_t k) const {
    if (!h_max_ || k > *h_max_)
        throw DomainError("ext queried beyond the tabulated horizon");
    return ext_.at(k).at(state);
}

const std::vector<BigCount>& CountTables::prefix_row(std::uint32_t state, std::size_t k) const {
    if (k >= rows_.size())
        throw DomainError("prefix row queried beyond the tabulated horizon");
    return rows_.at(k).at(state);
}

const BigCount& CountTables::nb_traces(std::size_t h) {
    if (!h_max_ || *h_max_ < h)
        extend(h);
    return ext_[h][0];
}

TracePrefix CountTables::trace(const BigCount& i, std::size_t h) {
    if (i < 0 || i >= nb_traces(h))
        throw OutOfBoundsError();
    TracePrefix prefix(graph_.alphabet);
    std::uint32_t x = 0;
    std::size_t k = h;
    BigCount m = i;
    for (std::size_t j = 0; j < h; ++j) {
        const auto& row = rows_[k - 1][x];
        // Largest edge index whose below-sum is <= m.
        auto it = std::upper_bound(row.begin(), row.end(), m);
        std::size_t edge = static_cast<std::size_t>(it - row.begin()) - 1;
        m -= row[edge];
        const Edge& e = graph_.edges[x][edge];
        prefix.append_rank(e.input);
        x = e.succ;
        --k;
    }
    return prefix;
}

BigCount CountTables::rank(const TracePrefix& p) {
    if (*p.alphabet() != *graph_.alphabet)
        throw InvalidPrefixError(0, "prefix alphabet does not match the generator's");
    const std::size_t h = p.length();
    extend(h);
    BigCount acc = 0;
    std::uint32_t x = 0;
    for (std::size_t j = 0; j < h; ++j) {
        std::uint64_t input = graph_.alphabet->rank(p.steps()[j]);
        const auto& out = graph_.edges[x];
        auto it = std::lower_bound(out.begin(), out.end(), input,
                                   [](const Edge& e, std::uint64_t v) { return e.input < v; });
        if (it == out.end() || it->input != input)
            throw InvalidPrefixError(
                j, "step " + std::to_string(j) + " (" +
                       p.step_assignment(j).to_string() +
                       ") is not admissible in the generator");
        std::size_t edge = static_cast<std::size_t>(it - out.begin());
        acc += rows_[h - 1 - j][x][edge];
        x = it->succ;
    }
    return acc;
}

BigCount count_paths(const ExploredGraph& g, std::size_t h) {
    const std::size_t n = g.state_count();
    if (n == 0)
        return 0;
    std::vector<BigCount> prev(n, BigCount(1));
    std::vector<BigCount> cur(n);
    for (std::size_t k = 1; k <= h; ++k) {
        for (std::uint32_t s = 0; s < n; ++s) {
            BigCount acc = 0;
            for (const auto& e : g.edges[s])
                acc += prev[e.succ];
            cur[s] = std::move(acc);
        }
        std::swap(prev, cur);
    }
    return prev[0];
}

} // namespace scengen
