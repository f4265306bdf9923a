#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scengen/alphabet.hpp"

namespace scengen {

// Canonical state key: equal monitor states must produce byte-equal keys.
// The library never interprets keys beyond equality and hashing.
using StateKey = std::string;

// A finite-memory monitor: a deterministic partial transition system over
// assignments to its input variables, accessed as a black box. Implementations
// must be immutable after construction; admissible() and step() are pure
// functions of (state key, input) and safe to call from multiple threads.
//
// Contract: admissible(x) returns, in strictly ascending input-rank order,
// exactly the inputs u for which step(x, u) is defined.
class Monitor {
public:
    virtual ~Monitor() = default;

    const AlphabetPtr& alphabet() const { return alphabet_; }

    virtual StateKey initial_state() const = 0;
    virtual std::vector<std::uint64_t> admissible(const StateKey& state) const = 0;
    virtual std::optional<StateKey> step(const StateKey& state, std::uint64_t input) const = 0;
    virtual std::string describe() const = 0;

    // Convenience: step by assignment.
    std::optional<StateKey> step(const StateKey& state, const Assignment& u) const;

protected:
    explicit Monitor(AlphabetPtr alphabet);
    AlphabetPtr alphabet_;
};

using MonitorPtr = std::shared_ptr<const Monitor>;

struct FsmTransition {
    std::string from;
    Assignment input;
    std::string to;
};

// Builds a monitor from an explicit transition table. The table must be
// deterministic: a (state, assignment) pair may appear at most once. Targets
// and sources must name declared states.
MonitorPtr make_explicit_fsm(AlphabetPtr alphabet,
                             std::vector<std::string> states,
                             const std::string& initial,
                             const std::vector<FsmTransition>& transitions,
                             std::string name = "fsm");

// The conjoint monitor Ma ⋈ Mb over Va ∪ Vb. Shared variables must have
// identical declared domains. A transition is defined iff both component
// transitions (on the projected inputs) are defined. The union variable
// order is Ma's variables followed by Mb's variables not in Ma.
MonitorPtr conjoin(MonitorPtr a, MonitorPtr b);

// Fold of conjoin over a non-empty list, left to right.
MonitorPtr conjoin_all(const std::vector<MonitorPtr>& monitors);

namespace keys {

// Length-prefixed pairing, so composite keys stay canonical.
StateKey pack_pair(const StateKey& a, const StateKey& b);
std::pair<StateKey, StateKey> unpack_pair(const StateKey& key);

void append_u32(StateKey& key, std::uint32_t v);
std::uint32_t read_u32(const StateKey& key, std::size_t offset);

} // namespace keys

} // namespace scengen
