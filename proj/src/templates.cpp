#include "scengen/templates.hpp"

#include <algorithm>
#include <optional>

#include "scengen/errors.hpp"

namespace scengen {

EventSpec EventSpec::value_in(std::string var, std::vector<std::string> values) {
    EventSpec e;
    e.kind = Kind::value_in;
    e.clauses.emplace_back(std::move(var), std::move(values));
    return e;
}

EventSpec EventSpec::any_of(
    std::vector<std::pair<std::string, std::vector<std::string>>> clauses) {
    EventSpec e;
    e.kind = Kind::value_in;
    e.clauses = std::move(clauses);
    return e;
}

EventSpec EventSpec::changed(std::string var) {
    EventSpec e;
    e.kind = Kind::changed;
    e.changed_var = std::move(var);
    return e;
}

namespace {

StateKey pack(std::initializer_list<std::uint32_t> parts) {
    StateKey key;
    for (auto p : parts)
        keys::append_u32(key, p);
    return key;
}

StateKey pack_vec(const std::vector<std::uint32_t>& parts) {
    StateKey key;
    for (auto p : parts)
        keys::append_u32(key, p);
    return key;
}

std::vector<std::uint32_t> unpack_vec(const StateKey& key, std::size_t count) {
    if (key.size() != 4 * count)
        throw DomainError("template monitor received a foreign state key");
    std::vector<std::uint32_t> parts(count);
    for (std::size_t i = 0; i < count; ++i)
        parts[i] = keys::read_u32(key, 4 * i);
    return parts;
}

// Admissibility of template monitors is decided by a pure transition
// predicate; admissible() enumerates the (small) input space against it.
class TemplateMonitor : public Monitor {
public:
    TemplateMonitor(AlphabetPtr alphabet, std::string name)
        : Monitor(std::move(alphabet)), name_(std::move(name)) {}

    std::vector<std::uint64_t> admissible(const StateKey& state) const override {
        std::uint64_t n = alphabet_->size();
        std::vector<std::uint64_t> out;
        for (std::uint64_t r = 0; r < n; ++r)
            if (apply(state, alphabet_->unrank(r)))
                out.push_back(r);
        return out;
    }

    std::optional<StateKey> step(const StateKey& state, std::uint64_t input) const override {
        return apply(state, alphabet_->unrank(input));
    }

    std::string describe() const override { return name_; }

protected:
    virtual std::optional<StateKey> apply(const StateKey& state,
                                          const std::vector<std::uint32_t>& values) const = 0;

    std::string name_;
};

std::uint32_t require_value(const Alphabet& a, std::size_t var, const std::string& value,
                            const std::string& who) {
    auto idx = a.value_index(var, value);
    if (!idx)
        throw DomainError(who + ": value '" + value + "' is not in the domain of '" +
                          a.variables()[var].name + "'");
    return *idx;
}

class RecoveryWindowMonitor final : public TemplateMonitor {
public:
    RecoveryWindowMonitor(AlphabetPtr alphabet, std::uint32_t fault, std::uint32_t repair,
                          unsigned wmin, unsigned wmax, bool idle_repair)
        : TemplateMonitor(std::move(alphabet), ""),
          fault_(fault),
          repair_(repair),
          wmin_(wmin),
          wmax_(wmax),
          idle_repair_(idle_repair) {
        name_ = "recovery_window(" + alphabet_->variables()[0].name + ")";
    }

    StateKey initial_state() const override { return pack({0}); }

protected:
    std::optional<StateKey> apply(const StateKey& state,
                                  const std::vector<std::uint32_t>& values) const override {
        std::uint32_t age = unpack_vec(state, 1)[0];
        std::uint32_t v = values[0];
        if (v == fault_) {
            if (age != 0)
                return std::nullopt;
            return pack({1});
        }
        if (v == repair_) {
            if (age == 0)
                return idle_repair_ ? std::optional<StateKey>(pack({0})) : std::nullopt;
            if (age < wmin_ || age > wmax_)
                return std::nullopt;
            return pack({0});
        }
        // no-op value
        if (age == 0)
            return pack({0});
        if (age + 1 > wmax_)
            return std::nullopt;
        return pack({age + 1});
    }

private:
    std::uint32_t fault_;
    std::uint32_t repair_;
    unsigned wmin_;
    unsigned wmax_;
    bool idle_repair_;
};

class RecurrenceMonitor final : public TemplateMonitor {
public:
    RecurrenceMonitor(AlphabetPtr alphabet, std::vector<bool> is_event, unsigned pmin,
                      unsigned pmax, bool forced)
        : TemplateMonitor(std::move(alphabet), ""),
          is_event_(std::move(is_event)),
          pmin_(pmin),
          pmax_(pmax),
          forced_(forced) {
        name_ = "recurrence(" + alphabet_->variables()[0].name + ")";
    }

    // state: steps since the last occurrence (start counts as one), saturated
    // at pmax + 1 ("window missed") in the unforced variant
    StateKey initial_state() const override { return pack({0}); }

protected:
    std::optional<StateKey> apply(const StateKey& state,
                                  const std::vector<std::uint32_t>& values) const override {
        std::uint32_t gap = unpack_vec(state, 1)[0];
        if (is_event_[values[0]]) {
            if (gap + 1 < pmin_ || gap + 1 > pmax_)
                return std::nullopt;
            return pack({0});
        }
        if (forced_) {
            if (gap + 1 > pmax_ - 1)
                return std::nullopt;
            return pack({gap + 1});
        }
        return pack({std::min(gap + 1, pmax_ + 1)});
    }

private:
    std::vector<bool> is_event_;
    unsigned pmin_;
    unsigned pmax_;
    bool forced_;
};

class ResponseWindowMonitor final : public TemplateMonitor {
public:
    ResponseWindowMonitor(AlphabetPtr alphabet, std::string name, EventSpec trigger,
                          EventSpec response, unsigned amin, unsigned amax, unsigned sustain)
        : TemplateMonitor(std::move(alphabet), std::move(name)),
          trigger_(std::move(trigger)),
          response_(std::move(response)),
          amin_(amin),
          amax_(amax),
          sustain_(sustain) {
        collect_tracked(trigger_);
        collect_tracked(response_);
    }

    // state: [tracked prev values (+1, 0 = unset)...] [streak] [pending]
    StateKey initial_state() const override {
        std::vector<std::uint32_t> parts(tracked_.size() + 2, 0);
        return pack_vec(parts);
    }

protected:
    std::optional<StateKey> apply(const StateKey& state,
                                  const std::vector<std::uint32_t>& values) const override {
        auto parts = unpack_vec(state, tracked_.size() + 2);
        std::uint32_t streak = parts[tracked_.size()];
        std::uint32_t pending = parts[tracked_.size() + 1];

        bool resp = fires(response_, values, parts);
        bool trig = fires(trigger_, values, parts);

        std::uint32_t next_pending = pending;
        if (pending > 0) {
            if (resp) {
                if (pending < amin_)
                    return std::nullopt; // early response
                next_pending = 0;
            } else {
                if (pending >= amax_)
                    return std::nullopt; // response overdue
                next_pending = pending + 1;
            }
        }

        std::uint32_t next_streak = trig ? streak + 1 : 0;
        if (next_streak >= sustain_) {
            if (next_pending > 0)
                return std::nullopt; // overlapping obligation
            next_pending = 1;
            next_streak = 0;
        }

        std::vector<std::uint32_t> next(tracked_.size() + 2);
        for (std::size_t i = 0; i < tracked_.size(); ++i)
            next[i] = values[tracked_[i]] + 1;
        next[tracked_.size()] = next_streak;
        next[tracked_.size() + 1] = next_pending;
        return pack_vec(next);
    }

private:
    void collect_tracked(const EventSpec& e) {
        if (e.kind != EventSpec::Kind::changed)
            return;
        auto idx = alphabet_->index_of(e.changed_var);
        if (!idx)
            throw DomainError("response_window: unknown variable '" + e.changed_var + "'");
        if (std::find(tracked_.begin(), tracked_.end(), *idx) == tracked_.end())
            tracked_.push_back(*idx);
    }

    bool fires(const EventSpec& e, const std::vector<std::uint32_t>& values,
               const std::vector<std::uint32_t>& parts) const {
        if (e.kind == EventSpec::Kind::changed) {
            auto var = *alphabet_->index_of(e.changed_var);
            auto slot = std::find(tracked_.begin(), tracked_.end(), var) - tracked_.begin();
            std::uint32_t prev = parts[static_cast<std::size_t>(slot)];
            return prev != 0 && prev != values[var] + 1;
        }
        for (const auto& [name, vals] : e.clauses) {
            auto var = *alphabet_->index_of(name);
            const auto& domain = alphabet_->variables()[var].domain;
            for (const auto& v : vals)
                if (domain[values[var]] == v)
                    return true;
        }
        return false;
    }

    EventSpec trigger_;
    EventSpec response_;
    unsigned amin_;
    unsigned amax_;
    unsigned sustain_;
    std::vector<std::size_t> tracked_; // variables whose previous value is kept
};

class AtMostKMonitor final : public TemplateMonitor {
public:
    struct Item {
        std::size_t var;
        std::vector<bool> busy;    // by value index
        std::vector<bool> release; // by value index; empty flag via latched
        bool latched;
    };

    AtMostKMonitor(AlphabetPtr alphabet, std::vector<Item> items, unsigned k)
        : TemplateMonitor(std::move(alphabet), "at_most_k"), items_(std::move(items)), k_(k) {}

    // state: bitmask of latched items that are busy
    StateKey initial_state() const override { return pack({0}); }

protected:
    std::optional<StateKey> apply(const StateKey& state,
                                  const std::vector<std::uint32_t>& values) const override {
        std::uint32_t mask = unpack_vec(state, 1)[0];
        std::uint32_t next_mask = 0;
        unsigned busy = 0;
        std::size_t latched_slot = 0;
        for (const auto& it : items_) {
            std::uint32_t v = values[it.var];
            if (it.latched) {
                bool was = (mask >> latched_slot) & 1;
                bool now = it.busy[v] ? true : (it.release[v] ? false : was);
                if (now) {
                    next_mask |= 1u << latched_slot;
                    ++busy;
                }
                ++latched_slot;
            } else if (it.busy[v]) {
                ++busy;
            }
        }
        if (busy > k_)
            return std::nullopt;
        return pack({next_mask});
    }

private:
    std::vector<Item> items_;
    unsigned k_;
};

class DwellMonitor final : public TemplateMonitor {
public:
    DwellMonitor(AlphabetPtr alphabet, unsigned dmin, bool is_max)
        : TemplateMonitor(std::move(alphabet), ""), bound_(dmin), is_max_(is_max) {
        name_ = std::string(is_max_ ? "max_dwell(" : "dwell(") +
                alphabet_->variables()[0].name + ")";
    }

    // state: [last value + 1 (0 = unset)] [current run length, capped]
    StateKey initial_state() const override { return pack({0, 0}); }

protected:
    std::optional<StateKey> apply(const StateKey& state,
                                  const std::vector<std::uint32_t>& values) const override {
        auto parts = unpack_vec(state, 2);
        std::uint32_t last = parts[0];
        std::uint32_t run = parts[1];
        std::uint32_t v = values[0];
        if (last == 0)
            return pack({v + 1, 1});
        if (last == v + 1) {
            if (is_max_ && run + 1 > bound_)
                return std::nullopt;
            std::uint32_t next_run = is_max_ ? run + 1 : std::min(run + 1, bound_);
            return pack({v + 1, next_run});
        }
        if (!is_max_ && run < bound_)
            return std::nullopt;
        return pack({v + 1, 1});
    }

private:
    unsigned bound_;
    bool is_max_;
};

class NoSimultaneousChangeMonitor final : public TemplateMonitor {
public:
    explicit NoSimultaneousChangeMonitor(AlphabetPtr alphabet)
        : TemplateMonitor(std::move(alphabet), "no_simultaneous_change") {}

    // state: previous values + 1, or all zeros before the first step
    StateKey initial_state() const override {
        return pack_vec(std::vector<std::uint32_t>(alphabet_->arity(), 0));
    }

protected:
    std::optional<StateKey> apply(const StateKey& state,
                                  const std::vector<std::uint32_t>& values) const override {
        auto prev = unpack_vec(state, alphabet_->arity());
        std::vector<std::uint32_t> next(values.size());
        unsigned changes = 0;
        bool unset = prev[0] == 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!unset && prev[i] != values[i] + 1)
                ++changes;
            next[i] = values[i] + 1;
        }
        if (changes > 1)
            return std::nullopt;
        return pack_vec(next);
    }
};

class StepBoundedMonitor final : public TemplateMonitor {
public:
    StepBoundedMonitor(AlphabetPtr alphabet, std::vector<int> amounts, int lo, int hi, int start,
                       unsigned min_dwell, unsigned warmup)
        : TemplateMonitor(std::move(alphabet), ""),
          amounts_(std::move(amounts)),
          lo_(lo),
          hi_(hi),
          start_(start),
          min_dwell_(min_dwell),
          warmup_(warmup) {
        name_ = "step_bounded(" + alphabet_->variables()[0].name + ")";
    }

    // state: [warmup left] [offset - lo] [steps the current value was held, capped]
    StateKey initial_state() const override {
        return pack({warmup_, static_cast<std::uint32_t>(start_ - lo_), min_dwell_});
    }

protected:
    std::optional<StateKey> apply(const StateKey& state,
                                  const std::vector<std::uint32_t>& values) const override {
        auto parts = unpack_vec(state, 3);
        std::uint32_t warm = parts[0];
        int offset = static_cast<int>(parts[1]) + lo_;
        std::uint32_t held = parts[2];
        int d = amounts_[values[0]];
        if (warm > 0) {
            if (d != 0)
                return std::nullopt;
            return pack({warm - 1, parts[1], held});
        }
        if (d == 0)
            return pack({0, parts[1], std::min(held + 1, min_dwell_)});
        if (held < min_dwell_)
            return std::nullopt;
        int next = offset + d;
        if (next < lo_ || next > hi_)
            return std::nullopt;
        return pack({0, static_cast<std::uint32_t>(next - lo_), 1});
    }

private:
    std::vector<int> amounts_;
    int lo_;
    int hi_;
    int start_;
    unsigned min_dwell_;
    unsigned warmup_;
};

class ValueRunWindowMonitor final : public TemplateMonitor {
public:
    ValueRunWindowMonitor(AlphabetPtr alphabet, std::uint32_t value, unsigned rmin, unsigned rmax)
        : TemplateMonitor(std::move(alphabet), ""), value_(value), rmin_(rmin), rmax_(rmax) {
        name_ = "value_run_window(" + alphabet_->variables()[0].name + ")";
    }

    // state: current run length of the watched value
    StateKey initial_state() const override { return pack({0}); }

protected:
    std::optional<StateKey> apply(const StateKey& state,
                                  const std::vector<std::uint32_t>& values) const override {
        std::uint32_t run = unpack_vec(state, 1)[0];
        if (values[0] == value_) {
            if (run + 1 > rmax_)
                return std::nullopt;
            return pack({run + 1});
        }
        if (run != 0 && run < rmin_)
            return std::nullopt;
        return pack({0});
    }

private:
    std::uint32_t value_;
    unsigned rmin_;
    unsigned rmax_;
};

void check_window(unsigned lo, unsigned hi, const std::string& who) {
    if (lo < 1)
        throw DomainError(who + ": window bounds must be positive");
    if (lo > hi)
        throw DomainError(who + ": window minimum exceeds its maximum");
}

} // namespace

MonitorPtr make_recovery_window(VariableDecl v, const std::string& fault_value,
                                const std::string& repair_value, unsigned wmin, unsigned wmax,
                                bool idle_repair_allowed) {
    check_window(wmin, wmax, "recovery_window");
    if (fault_value == repair_value)
        throw DomainError("recovery_window: fault and repair values must differ");
    auto alphabet = make_alphabet({std::move(v)});
    std::uint32_t f = require_value(*alphabet, 0, fault_value, "recovery_window");
    std::uint32_t r = require_value(*alphabet, 0, repair_value, "recovery_window");
    return std::make_shared<RecoveryWindowMonitor>(std::move(alphabet), f, r, wmin, wmax,
                                                   idle_repair_allowed);
}

MonitorPtr make_recurrence(VariableDecl v, std::vector<std::string> event_values, unsigned pmin,
                           unsigned pmax, bool forced) {
    check_window(pmin, pmax, "recurrence");
    if (event_values.empty())
        throw DomainError("recurrence: needs at least one event value");
    auto alphabet = make_alphabet({std::move(v)});
    std::vector<bool> is_event(alphabet->variables()[0].domain.size(), false);
    for (const auto& value : event_values)
        is_event[require_value(*alphabet, 0, value, "recurrence")] = true;
    return std::make_shared<RecurrenceMonitor>(std::move(alphabet), std::move(is_event), pmin,
                                               pmax, forced);
}

MonitorPtr make_response_window(std::vector<VariableDecl> vars, EventSpec trigger,
                                EventSpec response, unsigned amin, unsigned amax,
                                unsigned sustain) {
    check_window(amin, amax, "response_window");
    if (sustain < 1)
        throw DomainError("response_window: sustain must be at least 1");
    auto alphabet = make_alphabet(std::move(vars));
    for (const EventSpec* e : {&trigger, &response}) {
        if (e->kind == EventSpec::Kind::value_in) {
            if (e->clauses.empty())
                throw DomainError("response_window: event needs at least one clause");
            for (const auto& [name, values] : e->clauses) {
                auto idx = alphabet->index_of(name);
                if (!idx)
                    throw DomainError("response_window: unknown variable '" + name + "'");
                for (const auto& value : values)
                    require_value(*alphabet, *idx, value, "response_window");
            }
        }
    }
    std::string name = "response_window(" + alphabet->variables()[0].name + ")";
    return std::make_shared<ResponseWindowMonitor>(std::move(alphabet), std::move(name),
                                                   std::move(trigger), std::move(response), amin,
                                                   amax, sustain);
}

MonitorPtr make_at_most_k(std::vector<VariableDecl> vars, std::vector<AtMostKItem> items,
                          unsigned k) {
    if (items.empty())
        throw DomainError("at_most_k: needs at least one item");
    auto alphabet = make_alphabet(std::move(vars));
    std::vector<AtMostKMonitor::Item> compiled;
    std::size_t latched = 0;
    for (const auto& item : items) {
        auto idx = alphabet->index_of(item.var);
        if (!idx)
            throw DomainError("at_most_k: unknown variable '" + item.var + "'");
        if (item.busy.empty())
            throw DomainError("at_most_k: item on '" + item.var + "' has no busy values");
        const auto& domain = alphabet->variables()[*idx].domain;
        AtMostKMonitor::Item c;
        c.var = *idx;
        c.busy.assign(domain.size(), false);
        c.release.assign(domain.size(), false);
        c.latched = !item.release.empty();
        for (const auto& value : item.busy)
            c.busy[require_value(*alphabet, *idx, value, "at_most_k")] = true;
        for (const auto& value : item.release) {
            auto vi = require_value(*alphabet, *idx, value, "at_most_k");
            if (c.busy[vi])
                throw DomainError("at_most_k: value '" + value + "' on '" + item.var +
                                  "' is both busy and release");
            c.release[vi] = true;
        }
        if (c.latched && ++latched > 32)
            throw DomainError("at_most_k: at most 32 latched items are supported");
        compiled.push_back(std::move(c));
    }
    return std::make_shared<AtMostKMonitor>(std::move(alphabet), std::move(compiled), k);
}

MonitorPtr make_dwell(VariableDecl v, unsigned dmin) {
    if (dmin < 1)
        throw DomainError("dwell: minimum must be positive");
    return std::make_shared<DwellMonitor>(make_alphabet({std::move(v)}), dmin, false);
}

MonitorPtr make_max_dwell(VariableDecl v, unsigned dmax) {
    if (dmax < 1)
        throw DomainError("max_dwell: maximum must be positive");
    return std::make_shared<DwellMonitor>(make_alphabet({std::move(v)}), dmax, true);
}

MonitorPtr make_no_simultaneous_change(std::vector<VariableDecl> vars) {
    if (vars.empty())
        throw DomainError("no_simultaneous_change: needs at least one variable");
    return std::make_shared<NoSimultaneousChangeMonitor>(make_alphabet(std::move(vars)));
}

MonitorPtr make_step_bounded(VariableDecl v, std::vector<int> step_amounts, int lo, int hi,
                             int start, unsigned min_dwell, unsigned warmup) {
    if (step_amounts.size() != v.domain.size())
        throw DomainError("step_bounded: one step amount per domain value is required");
    if (lo > hi || start < lo || start > hi)
        throw DomainError("step_bounded: start offset must lie within [lo, hi]");
    if (min_dwell < 1)
        throw DomainError("step_bounded: min_dwell must be positive");
    if (std::find(step_amounts.begin(), step_amounts.end(), 0) == step_amounts.end())
        throw DomainError("step_bounded: some domain value must map to a zero step");
    return std::make_shared<StepBoundedMonitor>(make_alphabet({std::move(v)}),
                                                std::move(step_amounts), lo, hi, start, min_dwell,
                                                warmup);
}

MonitorPtr make_value_run_window(VariableDecl v, const std::string& value, unsigned rmin,
                                 unsigned rmax) {
    check_window(rmin, rmax, "value_run_window");
    if (v.domain.size() < 2)
        throw DomainError("value_run_window: the domain needs at least two values");
    auto alphabet = make_alphabet({std::move(v)});
    std::uint32_t vi = require_value(*alphabet, 0, value, "value_run_window");
    return std::make_shared<ValueRunWindowMonitor>(std::move(alphabet), vi, rmin, rmax);
}

} // namespace scengen
