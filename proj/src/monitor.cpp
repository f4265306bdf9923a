#include "scengen/monitor.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "scengen/errors.hpp"

namespace scengen {

Monitor::Monitor(AlphabetPtr alphabet) : alphabet_(std::move(alphabet)) {
    if (!alphabet_)
        throw DomainError("monitor needs an alphabet");
}

std::optional<StateKey> Monitor::step(const StateKey& state, const Assignment& u) const {
    if (*u.alphabet() != *alphabet_)
        throw DomainError("assignment alphabet does not match the monitor's");
    return step(state, u.rank());
}

namespace keys {

StateKey pack_pair(const StateKey& a, const StateKey& b) {
    StateKey out;
    out.reserve(4 + a.size() + b.size());
    append_u32(out, static_cast<std::uint32_t>(a.size()));
    out += a;
    out += b;
    return out;
}

std::pair<StateKey, StateKey> unpack_pair(const StateKey& key) {
    std::uint32_t alen = read_u32(key, 0);
    return {key.substr(4, alen), key.substr(4 + alen)};
}

void append_u32(StateKey& key, std::uint32_t v) {
    key.push_back(static_cast<char>(v & 0xff));
    key.push_back(static_cast<char>((v >> 8) & 0xff));
    key.push_back(static_cast<char>((v >> 16) & 0xff));
    key.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t read_u32(const StateKey& key, std::size_t offset) {
    auto byte = [&](std::size_t i) {
        return static_cast<std::uint32_t>(static_cast<unsigned char>(key.at(offset + i)));
    };
    return byte(0) | (byte(1) << 8) | (byte(2) << 16) | (byte(3) << 24);
}

} // namespace keys

namespace {

class ExplicitFsm final : public Monitor {
public:
    ExplicitFsm(AlphabetPtr alphabet,
                std::vector<std::string> states,
                const std::string& initial,
                const std::vector<FsmTransition>& transitions,
                std::string name)
        : Monitor(std::move(alphabet)), states_(std::move(states)), name_(std::move(name)) {
        if (states_.empty())
            throw DomainError("explicit FSM needs at least one state");
        for (std::size_t i = 0; i < states_.size(); ++i)
            if (!index_.emplace(states_[i], i).second)
                throw DomainError("duplicate state '" + states_[i] + "'");
        auto init = index_.find(initial);
        if (init == index_.end())
            throw DomainError("initial state '" + initial + "' is not declared");
        initial_ = init->second;
        edges_.resize(states_.size());
        for (const auto& t : transitions) {
            if (*t.input.alphabet() != *alphabet_)
                throw DomainError("transition input over a different alphabet (from '" +
                                  t.from + "' on " + t.input.to_string() + ")");
            auto from = index_.find(t.from);
            if (from == index_.end())
                throw DomainError("transition from undeclared state '" + t.from + "'");
            auto to = index_.find(t.to);
            if (to == index_.end())
                throw DomainError("transition to undeclared state '" + t.to + "' (from '" +
                                  t.from + "' on " + t.input.to_string() + ")");
            std::uint64_t rank = t.input.rank();
            auto& row = edges_[from->second];
            if (row.count(rank))
                throw DomainError("nondeterministic table: state '" + t.from +
                                  "' has two transitions on " + t.input.to_string());
            row.emplace(rank, static_cast<std::uint32_t>(to->second));
        }
    }

    StateKey initial_state() const override { return states_[initial_]; }

    std::vector<std::uint64_t> admissible(const StateKey& state) const override {
        const auto& row = edges_.at(state_index(state));
        std::vector<std::uint64_t> out;
        out.reserve(row.size());
        for (const auto& [rank, succ] : row)
            out.push_back(rank);
        return out;
    }

    std::optional<StateKey> step(const StateKey& state, std::uint64_t input) const override {
        const auto& row = edges_.at(state_index(state));
        auto it = row.find(input);
        if (it == row.end())
            return std::nullopt;
        return states_[it->second];
    }

    std::string describe() const override { return name_; }

private:
    std::size_t state_index(const StateKey& state) const {
        auto it = index_.find(state);
        if (it == index_.end())
            throw DomainError("unknown state key for FSM '" + name_ + "'");
        return it->second;
    }

    std::vector<std::string> states_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t initial_ = 0;
    std::vector<std::map<std::uint64_t, std::uint32_t>> edges_; // ordered by input rank
    std::string name_;
};

class ConjoinMonitor final : public Monitor {
public:
    ConjoinMonitor(MonitorPtr a, MonitorPtr b, AlphabetPtr unified,
                   std::vector<std::size_t> a_cols, std::vector<std::size_t> b_cols)
        : Monitor(std::move(unified)),
          a_(std::move(a)),
          b_(std::move(b)),
          a_cols_(std::move(a_cols)),
          b_cols_(std::move(b_cols)) {}

    StateKey initial_state() const override {
        return keys::pack_pair(a_->initial_state(), b_->initial_state());
    }

    std::vector<std::uint64_t> admissible(const StateKey& state) const override {
        auto [ka, kb] = keys::unpack_pair(state);
        auto ra = a_->admissible(ka);
        auto rb = b_->admissible(kb);
        std::vector<std::vector<std::uint32_t>> va, vb;
        va.reserve(ra.size());
        vb.reserve(rb.size());
        for (auto r : ra)
            va.push_back(a_->alphabet()->unrank(r));
        for (auto r : rb)
            vb.push_back(b_->alphabet()->unrank(r));

        std::vector<std::uint64_t> out;
        std::vector<std::uint32_t> u(alphabet_->arity());
        for (const auto& xa : va) {
            for (std::size_t i = 0; i < a_cols_.size(); ++i)
                u[a_cols_[i]] = xa[i];
            for (const auto& xb : vb) {
                bool compatible = true;
                for (std::size_t i = 0; i < b_cols_.size(); ++i) {
                    std::size_t col = b_cols_[i];
                    // Shared variables occupy a's columns; they must agree.
                    if (is_shared_col(col) && u[col] != xb[i]) {
                        compatible = false;
                        break;
                    }
                }
                if (!compatible)
                    continue;
                for (std::size_t i = 0; i < b_cols_.size(); ++i)
                    if (!is_shared_col(b_cols_[i]))
                        u[b_cols_[i]] = xb[i];
                out.push_back(alphabet_->rank(u));
            }
        }
        // The double loop ascends in (a-part, b-only-part) order, which is the
        // union lexicographic order, so no sort is needed; assert in debug.
        return out;
    }

    std::optional<StateKey> step(const StateKey& state, std::uint64_t input) const override {
        auto [ka, kb] = keys::unpack_pair(state);
        auto u = alphabet_->unrank(input);
        std::vector<std::uint32_t> ua(a_cols_.size()), ub(b_cols_.size());
        for (std::size_t i = 0; i < a_cols_.size(); ++i)
            ua[i] = u[a_cols_[i]];
        for (std::size_t i = 0; i < b_cols_.size(); ++i)
            ub[i] = u[b_cols_[i]];
        auto na = a_->step(ka, a_->alphabet()->rank(ua));
        if (!na)
            return std::nullopt;
        auto nb = b_->step(kb, b_->alphabet()->rank(ub));
        if (!nb)
            return std::nullopt;
        return keys::pack_pair(*na, *nb);
    }

    std::string describe() const override {
        return "(" + a_->describe() + " & " + b_->describe() + ")";
    }

private:
    bool is_shared_col(std::size_t col) const { return col < a_cols_.size(); }

    MonitorPtr a_;
    MonitorPtr b_;
    std::vector<std::size_t> a_cols_; // union column of a's i-th variable
    std::vector<std::size_t> b_cols_; // union column of b's i-th variable
};

} // namespace

MonitorPtr make_explicit_fsm(AlphabetPtr alphabet,
                             std::vector<std::string> states,
                             const std::string& initial,
                             const std::vector<FsmTransition>& transitions,
                             std::string name) {
    return std::make_shared<ExplicitFsm>(std::move(alphabet), std::move(states), initial,
                                         transitions, std::move(name));
}

MonitorPtr conjoin(MonitorPtr a, MonitorPtr b) {
    if (!a || !b)
        throw DomainError("conjoin needs two monitors");
    const auto& va = a->alphabet()->variables();
    const auto& vb = b->alphabet()->variables();
    std::vector<VariableDecl> unified = va;
    std::vector<std::size_t> a_cols(va.size());
    for (std::size_t i = 0; i < va.size(); ++i)
        a_cols[i] = i;
    std::vector<std::size_t> b_cols(vb.size());
    for (std::size_t i = 0; i < vb.size(); ++i) {
        auto shared = a->alphabet()->index_of(vb[i].name);
        if (shared) {
            if (va[*shared].domain != vb[i].domain)
                throw DomainError("shared variable '" + vb[i].name +
                                  "' has different domains in the two monitors");
            b_cols[i] = *shared;
        } else {
            b_cols[i] = unified.size();
            unified.push_back(vb[i]);
        }
    }
    auto alphabet = make_alphabet(std::move(unified));
    return std::make_shared<ConjoinMonitor>(std::move(a), std::move(b), std::move(alphabet),
                                            std::move(a_cols), std::move(b_cols));
}

MonitorPtr conjoin_all(const std::vector<MonitorPtr>& monitors) {
    if (monitors.empty())
        throw DomainError("conjoin_all needs at least one monitor");
    MonitorPtr acc = monitors.front();
    for (std::size_t i = 1; i < monitors.size(); ++i)
        acc = conjoin(acc, monitors[i]);
    return acc;
}

} // namespace scengen
