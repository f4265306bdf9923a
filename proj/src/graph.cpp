#include "scengen/graph.hpp"

#include <algorithm>
#include <unordered_map>

#include "scengen/errors.hpp"

namespace scengen {

ExploredGraph explore(const Monitor& m, const ExploreLimits& limits) {
    ExploredGraph g;
    g.alphabet = m.alphabet();

    std::unordered_map<StateKey, std::uint32_t> index;
    std::size_t edge_total = 0;

    auto intern = [&](StateKey key) -> std::pair<std::uint32_t, bool> {
        auto it = index.find(key);
        if (it != index.end())
            return {it->second, false};
        if (g.state_keys.size() >= limits.max_states)
            throw ResourceLimitError("exploration exceeded the state limit of " +
                                     std::to_string(limits.max_states) + " states");
        auto id = static_cast<std::uint32_t>(g.state_keys.size());
        index.emplace(key, id);
        g.state_keys.push_back(std::move(key));
        g.edges.emplace_back();
        return {id, true};
    };

    std::vector<bool> expanded;
    std::vector<bool> revisit_checked;

    std::vector<std::uint32_t> stack;
    auto [root, fresh] = intern(m.initial_state());
    (void)fresh;
    stack.push_back(root);

    while (!stack.empty()) {
        std::uint32_t id = stack.back();
        stack.pop_back();
        const StateKey key = g.state_keys[id]; // copy: vector may reallocate below
        auto inputs = m.admissible(key);
        if (edge_total + inputs.size() > limits.max_edges)
            throw ResourceLimitError("exploration exceeded the edge limit of " +
                                     std::to_string(limits.max_edges) + " edges");
        edge_total += inputs.size();
        g.edges[id].reserve(inputs.size());
        std::uint64_t prev = 0;
        bool first = true;
        std::vector<std::uint32_t> fresh_children;
        for (auto input : inputs) {
            if (!first && input <= prev)
                throw ContractViolationError("monitor '" + m.describe() +
                                             "' returned an unsorted admissible list");
            prev = input;
            first = false;
            auto succ = m.step(key, input);
            if (!succ)
                throw ContractViolationError(
                    "monitor '" + m.describe() +
                    "' listed an input as admissible but step() is undefined on it");
            auto [succ_id, is_new] = intern(std::move(*succ));
            g.edges[id].push_back(Edge{input, succ_id});
            if (is_new)
                fresh_children.push_back(succ_id);
        }
        expanded.resize(g.state_keys.size(), false);
        revisit_checked.resize(g.state_keys.size(), false);
        expanded[id] = true;

        // Best-effort canonical-key guard: the first time an already expanded
        // state is revisited, it must report the same admissible list again.
        for (const auto& e : g.edges[id]) {
            if (e.succ == id || !expanded[e.succ] || revisit_checked[e.succ])
                continue;
            revisit_checked[e.succ] = true;
            auto again = m.admissible(g.state_keys[e.succ]);
            const auto& recorded = g.edges[e.succ];
            bool same = again.size() == recorded.size();
            for (std::size_t i = 0; same && i < again.size(); ++i)
                same = again[i] == recorded[i].input;
            if (!same)
                throw ContractViolationError(
                    "monitor '" + m.describe() +
                    "' reported different admissible lists for the same state key "
                    "(broken canonical keys?)");
        }

        // Push in reverse so the smallest input is expanded first (preorder
        // indices then follow the lexicographic DFS).
        for (auto it = fresh_children.rbegin(); it != fresh_children.rend(); ++it)
            stack.push_back(*it);
    }

    return g;
}

GraphMonitor::GraphMonitor(const ExploredGraph& graph, std::string name)
    : Monitor(graph.alphabet), graph_(graph), name_(std::move(name)) {}

StateKey GraphMonitor::key_of(std::uint32_t index) {
    StateKey key;
    keys::append_u32(key, index);
    return key;
}

std::uint32_t GraphMonitor::index_of(const StateKey& key) {
    if (key.size() != 4)
        throw DomainError("bad graph-monitor state key");
    return keys::read_u32(key, 0);
}

StateKey GraphMonitor::initial_state() const { return key_of(0); }

std::vector<std::uint64_t> GraphMonitor::admissible(const StateKey& state) const {
    const auto& row = graph_.edges.at(index_of(state));
    std::vector<std::uint64_t> out;
    out.reserve(row.size());
    for (const auto& e : row)
        out.push_back(e.input);
    return out;
}

std::optional<StateKey> GraphMonitor::step(const StateKey& state, std::uint64_t input) const {
    const auto& row = graph_.edges.at(index_of(state));
    auto it = std::lower_bound(row.begin(), row.end(), input,
                               [](const Edge& e, std::uint64_t v) { return e.input < v; });
    if (it == row.end() || it->input != input)
        return std::nullopt;
    return key_of(it->succ);
}

} // namespace scengen
