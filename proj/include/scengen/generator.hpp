#pragma once

#include <memory>
#include <string>

#include "scengen/graph.hpp"

namespace scengen {

// Safe flags for the states of an explored graph: a state is safe iff it lies
// on some infinite computation path. The flags are the greatest fixed point
// of the one-step reachability equation.
struct SafeSet {
    std::vector<bool> flags;
    std::size_t safe_count() const {
        std::size_t n = 0;
        for (bool b : flags)
            n += b;
        return n;
    }
};

// Greatest fixed point by worklist deletion: states whose outgoing edges all
// lead into deleted states are deleted in turn, until stable. O(edges).
SafeSet compute_safe_set(const ExploredGraph& g);

// A non-blocking, trace-complete restriction of a monitor: only safe states
// are retained (indices compacted) and only edges into safe states are kept.
// Every retained state has out-degree >= 1; state 0 is the initial state.
// Immutable after synthesis and safe to share across threads.
struct ScenarioGenerator {
    ExploredGraph graph;
    std::string origin;           // which monitors were conjoined
    std::size_t pruned_states = 0; // states removed as unsafe

    std::size_t state_count() const { return graph.state_count(); }
    std::size_t edge_count() const { return graph.edge_count(); }
    const AlphabetPtr& alphabet() const { return graph.alphabet; }

    // Monitor view over the pruned graph (for conjoining or walking).
    // The returned view borrows this generator, which must outlive it.
    std::shared_ptr<const Monitor> as_monitor() const;
};

using ScenarioGeneratorPtr = std::shared_ptr<const ScenarioGenerator>;

// Explore, compute the safe set, prune. Throws NoTracesError when the initial
// state is unsafe (the monitor entails no trace).
ScenarioGeneratorPtr synthesize_sg(const Monitor& m, const ExploreLimits& limits = {});

// Prunes an already explored graph. Same semantics as synthesize_sg.
ScenarioGeneratorPtr prune_to_sg(const ExploredGraph& g, std::string origin);

// SG for (original ⋈ extra), computed by conjoining the extra constraint with
// the already pruned generator instead of the original monitor.
ScenarioGeneratorPtr incremental_regen(const ScenarioGeneratorPtr& sg, const MonitorPtr& extra,
                                       const ExploreLimits& limits = {});

} // namespace scengen
