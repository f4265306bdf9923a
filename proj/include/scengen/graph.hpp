#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "scengen/monitor.hpp"

namespace scengen {

struct Edge {
    std::uint64_t input; // rank into U_V
    std::uint32_t succ;  // successor state index
};

inline bool operator==(const Edge& a, const Edge& b) {
    return a.input == b.input && a.succ == b.succ;
}

// The reachable part of a monitor, materialized. State 0 is the initial
// state; edge lists are sorted by input rank; every state is reachable from
// state 0.
struct ExploredGraph {
    AlphabetPtr alphabet;
    std::vector<StateKey> state_keys;     // index -> canonical key
    std::vector<std::vector<Edge>> edges; // index -> sorted outgoing edges

    std::size_t state_count() const { return state_keys.size(); }
    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& row : edges)
            n += row.size();
        return n;
    }
};

struct ExploreLimits {
    std::size_t max_states = 5'000'000;
    std::size_t max_edges = 50'000'000;
};

// Depth-first exploration of a black-box monitor from its initial state.
// Deterministic for a deterministic monitor (states are indexed in DFS
// preorder, children in ascending input order). Throws ResourceLimitError
// when a limit is exceeded and ContractViolationError when a revisited key
// reports a different admissible list than it did the first time.
ExploredGraph explore(const Monitor& m, const ExploreLimits& limits = {});

// A monitor view over an explored graph (state keys are 4-byte little-endian
// state indices). Used to re-enter the synthesis pipeline with an already
// explicit graph, e.g. for incremental regeneration.
class GraphMonitor final : public Monitor {
public:
    explicit GraphMonitor(const ExploredGraph& graph, std::string name = "graph");

    StateKey initial_state() const override;
    std::vector<std::uint64_t> admissible(const StateKey& state) const override;
    std::optional<StateKey> step(const StateKey& state, std::uint64_t input) const override;
    std::string describe() const override { return name_; }

    static StateKey key_of(std::uint32_t index);
    static std::uint32_t index_of(const StateKey& key);

private:
    const ExploredGraph& graph_;
    std::string name_;
};

} // namespace scengen
