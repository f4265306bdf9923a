#include "scengen/generator.hpp"

#include <deque>

#include "scengen/errors.hpp"

namespace scengen {

SafeSet compute_safe_set(const ExploredGraph& g) {
    const std::size_t n = g.state_count();
    std::vector<std::uint32_t> live_out(n, 0);
    std::vector<std::vector<std::uint32_t>> preds(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        live_out[s] = static_cast<std::uint32_t>(g.edges[s].size());
        for (const auto& e : g.edges[s])
            preds[e.succ].push_back(s);
    }

    SafeSet safe;
    safe.flags.assign(n, true);
    std::deque<std::uint32_t> dead;
    for (std::uint32_t s = 0; s < n; ++s)
        if (live_out[s] == 0) {
            safe.flags[s] = false;
            dead.push_back(s);
        }
    while (!dead.empty()) {
        std::uint32_t s = dead.front();
        dead.pop_front();
        for (auto p : preds[s]) {
            if (!safe.flags[p])
                continue;
            if (--live_out[p] == 0) {
                safe.flags[p] = false;
                dead.push_back(p);
            }
        }
    }
    return safe;
}

namespace {

// Note: a safe state can only be reached through safe states (an unsafe state
// has no edge into a safe one), so pruning never disconnects retained states.
ExploredGraph prune(const ExploredGraph& g, const SafeSet& safe, std::size_t& removed) {
    const std::size_t n = g.state_count();
    std::vector<std::uint32_t> remap(n, UINT32_MAX);
    std::uint32_t next = 0;
    for (std::uint32_t s = 0; s < n; ++s)
        if (safe.flags[s])
            remap[s] = next++;
    removed = n - next;

    ExploredGraph out;
    out.alphabet = g.alphabet;
    out.state_keys.reserve(next);
    out.edges.reserve(next);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (!safe.flags[s])
            continue;
        out.state_keys.push_back(g.state_keys[s]);
        std::vector<Edge> row;
        for (const auto& e : g.edges[s])
            if (safe.flags[e.succ])
                row.push_back(Edge{e.input, remap[e.succ]});
        out.edges.push_back(std::move(row));
    }
    return out;
}

} // namespace

ScenarioGeneratorPtr prune_to_sg(const ExploredGraph& g, std::string origin) {
    auto safe = compute_safe_set(g);
    if (g.state_count() == 0 || !safe.flags[0])
        throw NoTracesError("the monitor entails no trace: its initial state is unsafe, "
                            "so no scenario generator exists for it");
    auto sg = std::make_shared<ScenarioGenerator>();
    sg->graph = prune(g, safe, sg->pruned_states);
    sg->origin = std::move(origin);
    return sg;
}

ScenarioGeneratorPtr synthesize_sg(const Monitor& m, const ExploreLimits& limits) {
    return prune_to_sg(explore(m, limits), m.describe());
}

std::shared_ptr<const Monitor> ScenarioGenerator::as_monitor() const {
    return std::make_shared<GraphMonitor>(graph, "sg(" + origin + ")");
}

ScenarioGeneratorPtr incremental_regen(const ScenarioGeneratorPtr& sg, const MonitorPtr& extra,
                                       const ExploreLimits& limits) {
    auto combined = conjoin(sg->as_monitor(), extra);
    auto out = prune_to_sg(explore(*combined, limits),
                           "(" + sg->origin + " & " + extra->describe() + ")");
    return out;
}

} // namespace scengen
