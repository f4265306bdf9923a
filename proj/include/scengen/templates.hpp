#pragma once

#include <string>
#include <vector>

#include "scengen/monitor.hpp"

namespace scengen {

// An observable event over the monitor's variables, used by the recurrence
// and response-window templates. Either "some listed variable currently has a
// value in its listed set" (any-of), or "the variable's value differs from
// the previous step" (never fires on the first step).
struct EventSpec {
    enum class Kind { value_in, changed };
    Kind kind = Kind::value_in;
    // value_in: the event fires iff any clause matches.
    std::vector<std::pair<std::string, std::vector<std::string>>> clauses;
    // changed: the watched variable.
    std::string changed_var;

    static EventSpec value_in(std::string var, std::vector<std::string> values);
    static EventSpec any_of(
        std::vector<std::pair<std::string, std::vector<std::string>>> clauses);
    static EventSpec changed(std::string var);
};

// Fault/repair protocol on one variable: a fault value may occur only when no
// fault is pending, and must be followed by the repair value after w time
// units, w in [wmin, wmax]. Other values are no-ops. When
// idle_repair_allowed is set, the repair value is also a no-op while idle
// (needed when several such monitors share one variable and repairs of the
// other faults must pass through).
MonitorPtr make_recovery_window(VariableDecl v, const std::string& fault_value,
                                const std::string& repair_value, unsigned wmin, unsigned wmax,
                                bool idle_repair_allowed = false);

// The event (value in event_values) recurs every [pmin, pmax] time units;
// the start of the trace counts as a virtual occurrence, so the first event
// falls in [pmin, pmax] as well. With forced=false only the safety half is
// kept: events are admissible exactly at gaps in [pmin, pmax] (or after the
// window has been missed for good, never again), but the monitor never
// forces one to happen.
MonitorPtr make_recurrence(VariableDecl v, std::vector<std::string> event_values, unsigned pmin,
                           unsigned pmax, bool forced = true);

// Whenever the trigger event has held for `sustain` consecutive steps, the
// response event must fire after d time units, d in [amin, amax]. Early
// responses to a pending obligation and triggers that overlap a pending
// obligation are inadmissible; unsolicited responses are no-ops. The trigger
// streak restarts after each firing.
MonitorPtr make_response_window(std::vector<VariableDecl> vars, EventSpec trigger,
                                EventSpec response, unsigned amin, unsigned amax,
                                unsigned sustain = 1);

// One monitored item for make_at_most_k. With an empty release set the item
// is busy exactly while its variable holds a busy value. With a release set
// the item is a latch: it becomes busy on a busy value and stays busy until a
// release value occurs. Several items may watch the same variable.
struct AtMostKItem {
    std::string var;
    std::vector<std::string> busy;
    std::vector<std::string> release;
};

// At most k items simultaneously busy.
MonitorPtr make_at_most_k(std::vector<VariableDecl> vars, std::vector<AtMostKItem> items,
                          unsigned k);

// Every maximal run of equal values lasts at least dmin time units.
MonitorPtr make_dwell(VariableDecl v, unsigned dmin);

// No run of equal values lasts more than dmax time units (the value changes
// at least every dmax).
MonitorPtr make_max_dwell(VariableDecl v, unsigned dmax);

// At most one of the variables changes value per step.
MonitorPtr make_no_simultaneous_change(std::vector<VariableDecl> vars);

// Quantized-step excursion: domain value i means "move by step_amounts[i]".
// The accumulated offset starts at `start` and must stay within [lo, hi].
// After a nonzero step the offset must hold for at least min_dwell steps
// before the next nonzero step, and the first `warmup` inputs must be
// zero steps. step_amounts must contain a zero.
MonitorPtr make_step_bounded(VariableDecl v, std::vector<int> step_amounts, int lo, int hi,
                             int start, unsigned min_dwell = 1, unsigned warmup = 0);

// Every maximal run of `value` lasts between rmin and rmax time units
// (e.g. unavailability periods recovered within a bounded window).
MonitorPtr make_value_run_window(VariableDecl v, const std::string& value, unsigned rmin,
                                 unsigned rmax);

} // namespace scengen
