#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scengen/monitor.hpp"

namespace scengen::dsl {

struct SourceLoc {
    int line = 0; // 1-based
    int col = 0;  // 1-based
};

struct Diagnostic {
    enum class Severity { error, warning };
    Severity severity = Severity::error;
    SourceLoc loc;
    std::string code; // stable short code, e.g. "nondet-fsm"
    std::string message;

    std::string to_string() const;
};

// ---- AST ----

struct AstVar {
    SourceLoc loc;
    std::string name;
    std::vector<std::string> values;
};

struct AstBinding {
    SourceLoc loc;
    std::string var;
    std::string value;
};

struct AstFsmState {
    SourceLoc loc;
    std::string name;
    bool initial = false;
};

struct AstFsmRule {
    SourceLoc loc;
    std::vector<AstBinding> pattern; // omitted variables are wildcards
    std::string from;
    std::string to;
};

struct AstEventClause {
    SourceLoc loc;
    std::string var;
    std::vector<std::string> values;
};

// One parsed template argument: `key: value`, bare word, `{a, b}` set,
// `v in {a, b} [until {c}]`, `changed(v)` or `any(clause, ...)`, optionally
// followed by `sustain N` for events.
struct AstArg {
    enum class Kind { word, set, var_in_set, changed, any };
    SourceLoc loc;
    std::string keyword; // empty when positional
    Kind kind = Kind::word;
    std::string word;
    std::vector<std::string> set;
    std::vector<AstEventClause> clauses;
    std::vector<std::string> until;
    bool has_until = false;
    unsigned sustain = 1;
    bool has_sustain = false;
};

struct AstTemplateCall {
    SourceLoc loc;
    std::string name;
    std::vector<AstArg> args;
};

struct AstMonitor {
    SourceLoc loc;
    std::string name;
    bool is_fsm = false;
    std::vector<AstFsmState> states; // fsm form
    std::vector<AstFsmRule> rules;   // fsm form
    AstTemplateCall call;            // template form
};

struct AstNameList {
    SourceLoc loc;
    std::string name; // group name; empty for the scenario expression
    std::vector<std::string> members;
    std::vector<SourceLoc> member_locs;
};

struct MonitorSpec {
    std::string version; // from the #! pragma
    std::vector<AstVar> vars;
    std::vector<AstMonitor> monitors;
    std::vector<AstNameList> groups;
    std::optional<AstNameList> scenario;
};

// ---- Operations ----

struct ParseResult {
    MonitorSpec spec;
    std::vector<Diagnostic> diagnostics;
    bool ok() const;
};

// Total: always returns; failures are reported through diagnostics with
// source locations. Recovers at statement boundaries.
ParseResult parse(std::string_view text);

// Canonical text form; parsing it again yields a structurally identical AST.
std::string pretty_print(const MonitorSpec& spec);

// One independence factor of a compiled scenario: monitors connected through
// shared variables, conjoined. Distinct factors share no variables.
struct Factor {
    std::string label; // a matching group hint, else the joined member names
    std::vector<std::string> members;
    MonitorPtr monitor;
};

struct CompileResult {
    std::vector<Factor> factors;
    std::vector<Diagnostic> diagnostics;
    bool ok() const;
};

// Compiles the spec's scenario expression. Subexpressions over disjoint
// variable sets stay separate factors (enabling product decomposition);
// overlapping ones are conjoined. Factor order follows first appearance in
// the expression; each monitor's variable order follows file declaration
// order. Independence is always computed from variable sets; group hints
// only label factors.
CompileResult compile(const MonitorSpec& spec);

// Same, for an explicit selection of monitor/group names instead of the
// spec's scenario line.
CompileResult compile_selection(const MonitorSpec& spec,
                                const std::vector<std::string>& names);

} // namespace scengen::dsl
