#include "scengen/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "scengen/errors.hpp"
#include "scengen/templates.hpp"

namespace scengen::dsl {

std::string Diagnostic::to_string() const {
    std::ostringstream out;
    out << loc.line << ':' << loc.col << ": "
        << (severity == Severity::error ? "error" : "warning") << " [" << code << "] "
        << message;
    return out.str();
}

bool ParseResult::ok() const {
    for (const auto& d : diagnostics)
        if (d.severity == Diagnostic::Severity::error)
            return false;
    return true;
}

bool CompileResult::ok() const {
    for (const auto& d : diagnostics)
        if (d.severity == Diagnostic::Severity::error)
            return false;
    return true;
}

namespace {

// ---- Lexer ----

struct Token {
    enum class Kind { word, punct, end };
    Kind kind = Kind::end;
    std::string text;
    SourceLoc loc;
};

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '+' ||
           c == '-';
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    // The "#! scengen-dsl vN" pragma occupies the first non-blank line.
    std::optional<std::string> take_pragma() {
        skip_blank_lines();
        if (pos_ + 1 < text_.size() && text_[pos_] == '#' && text_[pos_ + 1] == '!') {
            std::size_t eol = text_.find('\n', pos_);
            std::string line(text_.substr(pos_, eol == std::string_view::npos
                                                    ? text_.size() - pos_
                                                    : eol - pos_));
            advance_to(eol);
            return line;
        }
        return std::nullopt;
    }

    Token next() {
        skip_ws_and_comments();
        Token t;
        t.loc = here();
        if (pos_ >= text_.size())
            return t;
        char c = text_[pos_];
        if (word_char(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && word_char(text_[pos_]))
                bump();
            t.kind = Token::Kind::word;
            t.text = std::string(text_.substr(start, pos_ - start));
            return t;
        }
        bump();
        t.kind = Token::Kind::punct;
        t.text = std::string(1, c);
        return t;
    }

private:
    SourceLoc here() const { return {line_, col_}; }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void advance_to(std::size_t target) {
        if (target == std::string_view::npos)
            target = text_.size();
        while (pos_ < target && pos_ < text_.size())
            bump();
    }

    void skip_blank_lines() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            bump();
    }

    void skip_ws_and_comments() {
        for (;;) {
            while (pos_ < text_.size() &&
                   std::isspace(static_cast<unsigned char>(text_[pos_])))
                bump();
            if (pos_ < text_.size() && text_[pos_] == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    bump();
                continue;
            }
            return;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---- Parser ----

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) {
        auto pragma = lexer_.take_pragma();
        if (pragma) {
            // expected form: "#! scengen-dsl v1"
            std::istringstream in(*pragma);
            std::string bang, lang, version;
            in >> bang >> lang >> version;
            if (lang != "scengen-dsl" || version.empty())
                error({1, 1}, "bad-pragma", "unrecognized pragma '" + *pragma +
                                                "'; expected '#! scengen-dsl v1'");
            else
                result_.spec.version = version;
            if (version != "v1" && !version.empty() && lang == "scengen-dsl")
                error({1, 1}, "bad-pragma", "unsupported dsl version '" + version + "'");
        } else {
            error({1, 1}, "bad-pragma", "missing '#! scengen-dsl v1' header pragma");
        }
        advance();
    }

    ParseResult run() {
        while (cur_.kind != Token::Kind::end) {
            if (!statement())
                recover();
        }
        if (!result_.spec.scenario)
            error(cur_.loc, "no-scenario", "the file defines no 'scenario =' composition");
        return std::move(result_);
    }

private:
    void advance() {
        if (has_pushed_) {
            cur_ = pushed_;
            has_pushed_ = false;
        } else {
            cur_ = lexer_.next();
        }
    }

    bool at_word(const char* w) const {
        return cur_.kind == Token::Kind::word && cur_.text == w;
    }
    bool at_punct(char c) const {
        return cur_.kind == Token::Kind::punct && cur_.text[0] == c;
    }

    void error(SourceLoc loc, std::string code, std::string message) {
        result_.diagnostics.push_back(
            {Diagnostic::Severity::error, loc, std::move(code), std::move(message)});
    }
    void warn(SourceLoc loc, std::string code, std::string message) {
        result_.diagnostics.push_back(
            {Diagnostic::Severity::warning, loc, std::move(code), std::move(message)});
    }

    // Skip to the start of the next statement after a syntax error.
    void recover() {
        while (cur_.kind != Token::Kind::end && !at_word("var") && !at_word("monitor") &&
               !at_word("group") && !at_word("scenario"))
            advance();
    }

    bool expect_punct(char c, const char* what) {
        if (at_punct(c)) {
            advance();
            return true;
        }
        error(cur_.loc, "syntax",
              std::string("expected '") + c + "' " + what + ", found '" + shown() + "'");
        return false;
    }

    bool expect_word(const char* w) {
        if (at_word(w)) {
            advance();
            return true;
        }
        error(cur_.loc, "syntax",
              std::string("expected '") + w + "', found '" + shown() + "'");
        return false;
    }

    std::optional<std::string> expect_name(const char* what) {
        if (cur_.kind == Token::Kind::word) {
            std::string name = cur_.text;
            advance();
            return name;
        }
        error(cur_.loc, "syntax",
              std::string("expected ") + what + ", found '" + shown() + "'");
        return std::nullopt;
    }

    std::string shown() const {
        return cur_.kind == Token::Kind::end ? "end of file" : cur_.text;
    }

    bool statement() {
        if (at_word("var"))
            return var_decl();
        if (at_word("monitor"))
            return monitor_def();
        if (at_word("group"))
            return name_list_def(false);
        if (at_word("scenario"))
            return name_list_def(true);
        error(cur_.loc, "syntax",
              "expected 'var', 'monitor', 'group' or 'scenario', found '" + shown() + "'");
        return false;
    }

    bool var_decl() {
        AstVar v;
        v.loc = cur_.loc;
        advance();
        auto name = expect_name("a variable name");
        if (!name)
            return false;
        v.name = *name;
        if (!expect_word("in"))
            return false;
        if (!value_set(v.values))
            return false;
        for (const auto& existing : result_.spec.vars)
            if (existing.name == v.name) {
                error(v.loc, "dup-def", "variable '" + v.name + "' is already declared");
                return true;
            }
        result_.spec.vars.push_back(std::move(v));
        return true;
    }

    bool value_set(std::vector<std::string>& out) {
        if (!expect_punct('{', "to open a value set"))
            return false;
        if (at_punct('}')) { // empty set is a dedicated message
            error(cur_.loc, "syntax", "value set must not be empty");
            advance();
            return true;
        }
        for (;;) {
            if (cur_.kind != Token::Kind::word) {
                error(cur_.loc, "syntax", "expected a value, found '" + shown() + "'");
                return false;
            }
            out.push_back(cur_.text);
            advance();
            if (at_punct(',')) {
                advance();
                continue;
            }
            return expect_punct('}', "to close the value set");
        }
    }

    bool monitor_def() {
        AstMonitor m;
        m.loc = cur_.loc;
        advance();
        auto name = expect_name("a monitor name");
        if (!name)
            return false;
        m.name = *name;
        bool parsed = false;
        if (at_word("fsm")) {
            advance();
            m.is_fsm = true;
            parsed = fsm_body(m);
        } else if (at_punct('=')) {
            advance();
            m.is_fsm = false;
            parsed = template_call(m.call);
        } else {
            error(cur_.loc, "syntax",
                  "expected 'fsm' or '=' after the monitor name, found '" + shown() + "'");
            return false;
        }
        if (!parsed)
            return false;
        for (const auto& existing : result_.spec.monitors)
            if (existing.name == m.name) {
                error(m.loc, "dup-def", "monitor '" + m.name + "' is already defined");
                return true;
            }
        result_.spec.monitors.push_back(std::move(m));
        return true;
    }

    bool fsm_body(AstMonitor& m) {
        if (!expect_punct('{', "to open the fsm body"))
            return false;
        while (!at_punct('}')) {
            if (cur_.kind == Token::Kind::end) {
                error(cur_.loc, "syntax", "unterminated fsm body");
                return false;
            }
            if (at_word("state")) {
                AstFsmState s;
                s.loc = cur_.loc;
                advance();
                auto name = expect_name("a state name");
                if (!name)
                    return false;
                s.name = *name;
                if (at_word("initial")) {
                    s.initial = true;
                    advance();
                }
                if (!expect_punct(';', "after the state declaration"))
                    return false;
                m.states.push_back(std::move(s));
            } else if (at_word("on")) {
                AstFsmRule r;
                r.loc = cur_.loc;
                advance();
                if (!pattern(r.pattern))
                    return false;
                if (!expect_word("from"))
                    return false;
                auto from = expect_name("a state name");
                if (!from)
                    return false;
                r.from = *from;
                if (!expect_word("to"))
                    return false;
                auto to = expect_name("a state name");
                if (!to)
                    return false;
                r.to = *to;
                if (!expect_punct(';', "after the transition"))
                    return false;
                m.rules.push_back(std::move(r));
            } else {
                error(cur_.loc, "syntax",
                      "expected 'state', 'on' or '}' in the fsm body, found '" + shown() + "'");
                return false;
            }
        }
        advance();
        return true;
    }

    bool pattern(std::vector<AstBinding>& out) {
        for (;;) {
            AstBinding b;
            b.loc = cur_.loc;
            auto var = expect_name("a variable name in the pattern");
            if (!var)
                return false;
            b.var = *var;
            if (!expect_punct('=', "in the pattern binding"))
                return false;
            auto value = expect_name("a value");
            if (!value)
                return false;
            b.value = *value;
            out.push_back(std::move(b));
            if (at_punct(',')) {
                advance();
                continue;
            }
            return true;
        }
    }

    bool template_call(AstTemplateCall& call) {
        call.loc = cur_.loc;
        auto name = expect_name("a template name");
        if (!name)
            return false;
        call.name = *name;
        if (!expect_punct('(', "to open the template arguments"))
            return false;
        if (at_punct(')')) {
            advance();
            return true;
        }
        for (;;) {
            AstArg arg;
            if (!template_arg(arg))
                return false;
            call.args.push_back(std::move(arg));
            if (at_punct(',')) {
                advance();
                continue;
            }
            return expect_punct(')', "to close the template arguments");
        }
    }

    bool event_clause(AstEventClause& clause) {
        clause.loc = cur_.loc;
        auto var = expect_name("a variable name");
        if (!var)
            return false;
        clause.var = *var;
        if (!expect_word("in"))
            return false;
        return value_set(clause.values);
    }

    bool template_arg(AstArg& arg) {
        arg.loc = cur_.loc;
        // keyword prefix: IDENT ':'
        if (cur_.kind == Token::Kind::word) {
            Token saved = cur_;
            // lookahead by trying: need a one-token peek; emulate by lexing a copy
            // of the source is costly, so treat "word ':'" as keyword directly.
            advance();
            if (at_punct(':')) {
                arg.keyword = saved.text;
                advance();
            } else {
                pushed_ = cur_;
                cur_ = saved;
                has_pushed_ = true;
            }
        }
        if (at_punct('{')) {
            arg.kind = AstArg::Kind::set;
            return value_set(arg.set);
        }
        if (at_word("changed")) {
            advance();
            arg.kind = AstArg::Kind::changed;
            if (!expect_punct('(', "after 'changed'"))
                return false;
            AstEventClause clause;
            clause.loc = cur_.loc;
            auto var = expect_name("a variable name");
            if (!var)
                return false;
            clause.var = *var;
            arg.clauses.push_back(std::move(clause));
            if (!expect_punct(')', "to close 'changed(...)'"))
                return false;
            return maybe_sustain(arg);
        }
        if (at_word("any")) {
            advance();
            arg.kind = AstArg::Kind::any;
            if (!expect_punct('(', "after 'any'"))
                return false;
            for (;;) {
                AstEventClause clause;
                if (!event_clause(clause))
                    return false;
                arg.clauses.push_back(std::move(clause));
                if (at_punct(',')) {
                    advance();
                    continue;
                }
                break;
            }
            if (!expect_punct(')', "to close 'any(...)'"))
                return false;
            return maybe_sustain(arg);
        }
        // word, or `word in {...} [until {...}]`
        auto word = expect_name("an argument");
        if (!word)
            return false;
        arg.word = *word;
        if (at_word("in")) {
            advance();
            arg.kind = AstArg::Kind::var_in_set;
            AstEventClause clause;
            clause.loc = arg.loc;
            clause.var = arg.word;
            if (!value_set(clause.values))
                return false;
            arg.clauses.push_back(std::move(clause));
            if (at_word("until")) {
                advance();
                arg.has_until = true;
                if (!value_set(arg.until))
                    return false;
            }
            return maybe_sustain(arg);
        }
        arg.kind = AstArg::Kind::word;
        return true;
    }

    bool maybe_sustain(AstArg& arg) {
        if (!at_word("sustain"))
            return true;
        advance();
        auto n = expect_name("a sustain count");
        if (!n)
            return false;
        try {
            arg.sustain = static_cast<unsigned>(std::stoul(*n));
            arg.has_sustain = true;
        } catch (...) {
            error(arg.loc, "bad-args", "sustain expects a positive integer, got '" + *n + "'");
            return false;
        }
        return true;
    }

    bool name_list_def(bool is_scenario) {
        AstNameList list;
        list.loc = cur_.loc;
        advance();
        if (!is_scenario) {
            auto name = expect_name("a group name");
            if (!name)
                return false;
            list.name = *name;
        }
        if (!expect_punct('=', is_scenario ? "after 'scenario'" : "after the group name"))
            return false;
        for (;;) {
            SourceLoc at = cur_.loc;
            auto member = expect_name("a monitor name");
            if (!member)
                return false;
            list.members.push_back(*member);
            list.member_locs.push_back(at);
            if (at_punct('&')) {
                advance();
                continue;
            }
            break;
        }
        if (is_scenario) {
            if (result_.spec.scenario)
                error(list.loc, "dup-def", "only one 'scenario =' composition is allowed");
            else
                result_.spec.scenario = std::move(list);
        } else {
            for (const auto& existing : result_.spec.groups)
                if (existing.name == list.name) {
                    error(list.loc, "dup-def", "group '" + list.name + "' is already defined");
                    return true;
                }
            result_.spec.groups.push_back(std::move(list));
        }
        return true;
    }

    Lexer lexer_;
    Token cur_;
    Token pushed_;
    bool has_pushed_ = false;
    ParseResult result_;
};

} // namespace

ParseResult parse(std::string_view text) {
    Parser parser(text);
    return parser.run();
}

// ---- pretty printer ----

namespace {

void print_set(std::ostream& out, const std::vector<std::string>& values) {
    out << "{ ";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out << ", ";
        out << values[i];
    }
    out << " }";
}

void print_arg(std::ostream& out, const AstArg& arg) {
    if (!arg.keyword.empty())
        out << arg.keyword << ": ";
    switch (arg.kind) {
    case AstArg::Kind::word:
        out << arg.word;
        break;
    case AstArg::Kind::set:
        print_set(out, arg.set);
        break;
    case AstArg::Kind::var_in_set:
        out << arg.clauses[0].var << " in ";
        print_set(out, arg.clauses[0].values);
        if (arg.has_until) {
            out << " until ";
            print_set(out, arg.until);
        }
        break;
    case AstArg::Kind::changed:
        out << "changed(" << arg.clauses[0].var << ")";
        break;
    case AstArg::Kind::any:
        out << "any(";
        for (std::size_t i = 0; i < arg.clauses.size(); ++i) {
            if (i)
                out << ", ";
            out << arg.clauses[i].var << " in ";
            print_set(out, arg.clauses[i].values);
        }
        out << ")";
        break;
    }
    if (arg.has_sustain)
        out << " sustain " << arg.sustain;
}

} // namespace

std::string pretty_print(const MonitorSpec& spec) {
    std::ostringstream out;
    out << "#! scengen-dsl " << (spec.version.empty() ? "v1" : spec.version) << "\n\n";
    for (const auto& v : spec.vars) {
        out << "var " << v.name << " in ";
        print_set(out, v.values);
        out << "\n";
    }
    for (const auto& m : spec.monitors) {
        if (m.is_fsm) {
            out << "monitor " << m.name << " fsm {\n";
            for (const auto& s : m.states)
                out << "  state " << s.name << (s.initial ? " initial" : "") << ";\n";
            for (const auto& r : m.rules) {
                out << "  on ";
                for (std::size_t i = 0; i < r.pattern.size(); ++i) {
                    if (i)
                        out << ", ";
                    out << r.pattern[i].var << "=" << r.pattern[i].value;
                }
                out << " from " << r.from << " to " << r.to << ";\n";
            }
            out << "}\n";
        } else {
            out << "monitor " << m.name << " = " << m.call.name << "(";
            for (std::size_t i = 0; i < m.call.args.size(); ++i) {
                if (i)
                    out << ", ";
                print_arg(out, m.call.args[i]);
            }
            out << ")\n";
        }
    }
    for (const auto& g : spec.groups) {
        out << "group " << g.name << " = ";
        for (std::size_t i = 0; i < g.members.size(); ++i) {
            if (i)
                out << " & ";
            out << g.members[i];
        }
        out << "\n";
    }
    if (spec.scenario) {
        out << "scenario = ";
        for (std::size_t i = 0; i < spec.scenario->members.size(); ++i) {
            if (i)
                out << " & ";
            out << spec.scenario->members[i];
        }
        out << "\n";
    }
    return out.str();
}

// ---- compiler ----

namespace {

class Compiler {
public:
    Compiler(const MonitorSpec& spec, CompileResult& result) : spec_(spec), result_(result) {
        for (std::size_t i = 0; i < spec_.vars.size(); ++i)
            var_index_[spec_.vars[i].name] = i;
    }

    void error(SourceLoc loc, std::string code, std::string message) {
        result_.diagnostics.push_back(
            {Diagnostic::Severity::error, loc, std::move(code), std::move(message)});
    }

    const AstVar* find_var(const std::string& name) {
        auto it = var_index_.find(name);
        return it == var_index_.end() ? nullptr : &spec_.vars[it->second];
    }

    // Variables of one monitor definition, in file declaration order.
    std::vector<VariableDecl> collect_vars(const std::set<std::string>& names) {
        std::vector<VariableDecl> out;
        for (const auto& v : spec_.vars)
            if (names.count(v.name))
                out.push_back({v.name, v.values});
        return out;
    }

    MonitorPtr build_monitor(const AstMonitor& m) {
        return m.is_fsm ? build_fsm(m) : build_template(m);
    }

    MonitorPtr build_fsm(const AstMonitor& m) {
        bool bad = false;
        std::set<std::string> var_names;
        for (const auto& r : m.rules) {
            for (const auto& b : r.pattern) {
                const AstVar* v = find_var(b.var);
                if (!v) {
                    error(b.loc, "unknown-var",
                          "pattern references undeclared variable '" + b.var + "'");
                    bad = true;
                    continue;
                }
                if (std::find(v->values.begin(), v->values.end(), b.value) == v->values.end()) {
                    error(b.loc, "unknown-value",
                          "value '" + b.value + "' is not in the domain of '" + b.var + "'");
                    bad = true;
                }
                var_names.insert(b.var);
            }
        }
        if (m.states.empty()) {
            error(m.loc, "bad-fsm", "fsm '" + m.name + "' declares no states");
            return nullptr;
        }
        if (var_names.empty()) {
            error(m.loc, "bad-fsm", "fsm '" + m.name + "' binds no variables");
            return nullptr;
        }
        std::vector<std::string> states;
        std::string initial;
        int initial_count = 0;
        for (const auto& s : m.states) {
            if (std::find(states.begin(), states.end(), s.name) != states.end()) {
                error(s.loc, "dup-def", "state '" + s.name + "' is declared twice");
                bad = true;
                continue;
            }
            states.push_back(s.name);
            if (s.initial) {
                initial = s.name;
                ++initial_count;
            }
        }
        if (initial_count != 1) {
            error(m.loc, "no-initial",
                  "fsm '" + m.name + "' must declare exactly one initial state");
            bad = true;
        }
        if (bad)
            return nullptr;

        auto alphabet = make_alphabet(collect_vars(var_names));
        // Wildcard expansion: omitted variables run over their whole domain
        // in declared order.
        std::map<std::pair<std::string, std::uint64_t>, std::pair<std::string, SourceLoc>> seen;
        std::vector<FsmTransition> transitions;
        for (const auto& r : m.rules) {
            if (std::find(states.begin(), states.end(), r.from) == states.end()) {
                error(r.loc, "dangling-state",
                      "transition from undeclared state '" + r.from + "'");
                bad = true;
                continue;
            }
            if (std::find(states.begin(), states.end(), r.to) == states.end()) {
                error(r.loc, "dangling-state",
                      "transition to undeclared state '" + r.to + "'");
                bad = true;
                continue;
            }
            std::vector<std::int64_t> fixed(alphabet->arity(), -1);
            bool rule_bad = false;
            for (const auto& b : r.pattern) {
                auto idx = alphabet->index_of(b.var);
                auto vi = alphabet->value_index(*idx, b.value);
                if (fixed[*idx] != -1) {
                    error(b.loc, "bad-pattern",
                          "variable '" + b.var + "' is bound twice in one pattern");
                    rule_bad = true;
                    break;
                }
                fixed[*idx] = static_cast<std::int64_t>(*vi);
            }
            if (rule_bad) {
                bad = true;
                continue;
            }
            std::vector<std::uint32_t> values(alphabet->arity(), 0);
            expand(alphabet, fixed, values, 0, [&](const std::vector<std::uint32_t>& vals) {
                std::uint64_t rank = alphabet->rank(vals);
                auto key = std::make_pair(r.from, rank);
                auto it = seen.find(key);
                if (it != seen.end()) {
                    Assignment u(alphabet, vals);
                    error(r.loc, "nondet-fsm",
                          "state '" + r.from + "' already has a transition on " +
                              u.to_string() + " (first defined at " +
                              std::to_string(it->second.second.line) + ":" +
                              std::to_string(it->second.second.col) + ")");
                    bad = true;
                    return;
                }
                seen.emplace(key, std::make_pair(r.to, r.loc));
                transitions.push_back({r.from, Assignment(alphabet, vals), r.to});
            });
        }
        if (bad)
            return nullptr;
        try {
            return make_explicit_fsm(alphabet, states, initial, transitions, m.name);
        } catch (const Error& e) {
            error(m.loc, "bad-fsm", e.what());
            return nullptr;
        }
    }

    template <typename F>
    void expand(const AlphabetPtr& alphabet, const std::vector<std::int64_t>& fixed,
                std::vector<std::uint32_t>& values, std::size_t var, F&& emit) {
        if (var == alphabet->arity()) {
            emit(values);
            return;
        }
        if (fixed[var] >= 0) {
            values[var] = static_cast<std::uint32_t>(fixed[var]);
            expand(alphabet, fixed, values, var + 1, emit);
            return;
        }
        for (std::uint32_t v = 0; v < alphabet->variables()[var].domain.size(); ++v) {
            values[var] = v;
            expand(alphabet, fixed, values, var + 1, emit);
        }
    }

    // -- template interpretation helpers --

    struct Args {
        const AstMonitor& m;
        Compiler& c;
        std::size_t next = 0;
        bool bad = false;

        const AstArg* take(const char* what) {
            if (next >= m.call.args.size()) {
                c.error(m.call.loc, "bad-args",
                        m.call.name + ": missing argument: expected " + std::string(what));
                bad = true;
                return nullptr;
            }
            return &m.call.args[next++];
        }

        const AstArg* take_keyword(const char* key) {
            for (const auto& a : m.call.args)
                if (a.keyword == key)
                    return &a;
            return nullptr;
        }

        bool done() const { return next >= m.call.args.size(); }
    };

    std::optional<std::string> arg_word(Args& args, const AstArg* a, const char* what) {
        if (!a)
            return std::nullopt;
        if (a->kind != AstArg::Kind::word) {
            error(a->loc, "bad-args",
                  args.m.call.name + ": expected " + std::string(what));
            args.bad = true;
            return std::nullopt;
        }
        return a->word;
    }

    std::optional<long> arg_int(Args& args, const AstArg* a, const char* what) {
        auto w = arg_word(args, a, what);
        if (!w)
            return std::nullopt;
        try {
            std::size_t used = 0;
            long value = std::stol(*w, &used);
            if (used != w->size())
                throw std::invalid_argument("trailing");
            return value;
        } catch (...) {
            error(a->loc, "bad-args",
                  args.m.call.name + ": expected an integer for " + std::string(what) +
                      ", got '" + *w + "'");
            args.bad = true;
            return std::nullopt;
        }
    }

    std::optional<VariableDecl> arg_var(Args& args, const AstArg* a) {
        auto w = arg_word(args, a, "a variable name");
        if (!w)
            return std::nullopt;
        const AstVar* v = find_var(*w);
        if (!v) {
            error(a->loc, "unknown-var", args.m.call.name + ": unknown variable '" + *w + "'");
            args.bad = true;
            return std::nullopt;
        }
        return VariableDecl{v->name, v->values};
    }

    EventSpec arg_event(Args& args, const AstArg* a, std::set<std::string>& vars_out,
                        unsigned& sustain_out) {
        EventSpec spec;
        if (!a)
            return spec;
        if (a->has_sustain)
            sustain_out = a->sustain;
        if (a->kind == AstArg::Kind::changed) {
            vars_out.insert(a->clauses[0].var);
            return EventSpec::changed(a->clauses[0].var);
        }
        if (a->kind == AstArg::Kind::var_in_set || a->kind == AstArg::Kind::any) {
            std::vector<std::pair<std::string, std::vector<std::string>>> clauses;
            for (const auto& clause : a->clauses) {
                vars_out.insert(clause.var);
                clauses.emplace_back(clause.var, clause.values);
            }
            return EventSpec::any_of(std::move(clauses));
        }
        error(a->loc, "bad-args",
              args.m.call.name +
                  ": expected an event (var in {..}, changed(var) or any(...))");
        args.bad = true;
        return spec;
    }

    MonitorPtr build_template(const AstMonitor& m) {
        const std::string& t = m.call.name;
        Args args{m, *this};
        try {
            if (t == "recovery_window")
                return t_recovery(args);
            if (t == "recurrence")
                return t_recurrence(args);
            if (t == "response_window")
                return t_response(args);
            if (t == "at_most_k")
                return t_at_most_k(args);
            if (t == "dwell" || t == "max_dwell")
                return t_dwell(args, t == "max_dwell");
            if (t == "no_simultaneous_change")
                return t_no_sim(args);
            if (t == "step_bounded")
                return t_step_bounded(args);
            if (t == "value_run_window")
                return t_run_window(args);
        } catch (const Error& e) {
            error(m.call.loc, "bad-args", t + ": " + e.what());
            return nullptr;
        }
        error(m.call.loc, "unknown-template", "unknown template '" + t + "'");
        return nullptr;
    }

    MonitorPtr t_recovery(Args& args) {
        auto v = arg_var(args, args.take("a variable name"));
        auto fault = arg_word(args, args.take("fault: VALUE"), "the fault value");
        auto repair = arg_word(args, args.take("repair: VALUE"), "the repair value");
        auto wmin = arg_int(args, args.take("the window minimum"), "the window minimum");
        auto wmax = arg_int(args, args.take("the window maximum"), "the window maximum");
        bool idle_repair = false;
        if (!args.done()) {
            auto mode = arg_word(args, args.take("idle_repair: allow|forbid"), "idle_repair");
            if (mode) {
                if (*mode == "allow")
                    idle_repair = true;
                else if (*mode != "forbid") {
                    error(args.m.call.loc, "bad-args",
                          "recovery_window: idle_repair must be 'allow' or 'forbid'");
                    args.bad = true;
                }
            }
        }
        if (args.bad || !v || !fault || !repair || !wmin || !wmax)
            return nullptr;
        return make_recovery_window(*v, *fault, *repair, static_cast<unsigned>(*wmin),
                                    static_cast<unsigned>(*wmax), idle_repair);
    }

    MonitorPtr t_recurrence(Args& args) {
        const AstArg* ev = args.take("VAR in { events }");
        if (ev && ev->kind != AstArg::Kind::var_in_set) {
            error(ev->loc, "bad-args", "recurrence: expected 'VAR in { events }'");
            args.bad = true;
            ev = nullptr;
        }
        auto pmin = arg_int(args, args.take("the period minimum"), "the period minimum");
        auto pmax = arg_int(args, args.take("the period maximum"), "the period maximum");
        bool forced = true;
        if (const AstArg* f = args.take_keyword("forced")) {
            auto w = arg_word(args, f, "forced: yes|no");
            if (w) {
                if (*w == "no")
                    forced = false;
                else if (*w != "yes") {
                    error(f->loc, "bad-args", "recurrence: forced must be 'yes' or 'no'");
                    args.bad = true;
                }
            }
        }
        if (args.bad || !ev || !pmin || !pmax)
            return nullptr;
        const AstVar* v = find_var(ev->clauses[0].var);
        if (!v) {
            error(ev->loc, "unknown-var",
                  "recurrence: unknown variable '" + ev->clauses[0].var + "'");
            return nullptr;
        }
        return make_recurrence({v->name, v->values}, ev->clauses[0].values,
                               static_cast<unsigned>(*pmin), static_cast<unsigned>(*pmax),
                               forced);
    }

    MonitorPtr t_response(Args& args) {
        const AstArg* trig = args.take_keyword("trigger");
        const AstArg* resp = args.take_keyword("response");
        if (!trig || !resp) {
            error(args.m.call.loc, "bad-args",
                  "response_window needs 'trigger:' and 'response:' events");
            return nullptr;
        }
        std::set<std::string> var_names;
        unsigned sustain = 1;
        unsigned ignored = 1;
        EventSpec trigger = arg_event(args, trig, var_names, sustain);
        EventSpec response = arg_event(args, resp, var_names, ignored);
        // positional window bounds: the two non-keyword args
        std::vector<const AstArg*> rest;
        for (const auto& a : args.m.call.args)
            if (a.keyword.empty())
                rest.push_back(&a);
        if (rest.size() != 2) {
            error(args.m.call.loc, "bad-args",
                  "response_window needs exactly two window bounds");
            return nullptr;
        }
        auto amin = arg_int(args, rest[0], "the window minimum");
        auto amax = arg_int(args, rest[1], "the window maximum");
        if (args.bad || !amin || !amax)
            return nullptr;
        for (const auto& name : var_names)
            if (!find_var(name)) {
                error(args.m.call.loc, "unknown-var",
                      "response_window: unknown variable '" + name + "'");
                return nullptr;
            }
        return make_response_window(collect_vars(var_names), std::move(trigger),
                                    std::move(response), static_cast<unsigned>(*amin),
                                    static_cast<unsigned>(*amax), sustain);
    }

    MonitorPtr t_at_most_k(Args& args) {
        auto k = arg_int(args, args.take("the bound k"), "the bound k");
        if (!k)
            return nullptr;
        std::vector<AtMostKItem> items;
        std::set<std::string> var_names;
        while (!args.done()) {
            const AstArg* a = args.take("an item VAR in { busy } [until { release }]");
            if (!a || a->kind != AstArg::Kind::var_in_set) {
                error(a ? a->loc : args.m.call.loc, "bad-args",
                      "at_most_k: items look like 'VAR in { busy } [until { release }]'");
                return nullptr;
            }
            if (!find_var(a->clauses[0].var)) {
                error(a->loc, "unknown-var",
                      "at_most_k: unknown variable '" + a->clauses[0].var + "'");
                return nullptr;
            }
            var_names.insert(a->clauses[0].var);
            items.push_back({a->clauses[0].var, a->clauses[0].values,
                             a->has_until ? a->until : std::vector<std::string>{}});
        }
        if (items.empty()) {
            error(args.m.call.loc, "bad-args", "at_most_k needs at least one item");
            return nullptr;
        }
        return make_at_most_k(collect_vars(var_names), items, static_cast<unsigned>(*k));
    }

    MonitorPtr t_dwell(Args& args, bool is_max) {
        auto v = arg_var(args, args.take("a variable name"));
        auto bound = arg_int(args, args.take("the dwell bound"), "the dwell bound");
        if (args.bad || !v || !bound)
            return nullptr;
        return is_max ? make_max_dwell(*v, static_cast<unsigned>(*bound))
                      : make_dwell(*v, static_cast<unsigned>(*bound));
    }

    MonitorPtr t_no_sim(Args& args) {
        std::set<std::string> var_names;
        while (!args.done()) {
            auto v = arg_var(args, args.take("a variable name"));
            if (!v)
                return nullptr;
            var_names.insert(v->name);
        }
        if (var_names.empty()) {
            error(args.m.call.loc, "bad-args",
                  "no_simultaneous_change needs at least one variable");
            return nullptr;
        }
        return make_no_simultaneous_change(collect_vars(var_names));
    }

    MonitorPtr t_step_bounded(Args& args) {
        auto v = arg_var(args, args.take("a variable name"));
        const AstArg* steps = args.take_keyword("steps");
        const AstArg* lo = args.take_keyword("lo");
        const AstArg* hi = args.take_keyword("hi");
        if (!v || !steps || !lo || !hi) {
            error(args.m.call.loc, "bad-args",
                  "step_bounded needs 'steps: {..}', 'lo:', 'hi:'");
            return nullptr;
        }
        if (steps->kind != AstArg::Kind::set) {
            error(steps->loc, "bad-args", "step_bounded: 'steps:' expects a set of integers");
            return nullptr;
        }
        std::vector<int> amounts;
        for (const auto& w : steps->set) {
            try {
                amounts.push_back(std::stoi(w));
            } catch (...) {
                error(steps->loc, "bad-args",
                      "step_bounded: step amount '" + w + "' is not an integer");
                return nullptr;
            }
        }
        auto lo_v = arg_int(args, lo, "lo");
        auto hi_v = arg_int(args, hi, "hi");
        long start = 0, dwell = 1, warmup = 0;
        if (const AstArg* a = args.take_keyword("start"))
            start = arg_int(args, a, "start").value_or(0);
        if (const AstArg* a = args.take_keyword("min_dwell"))
            dwell = arg_int(args, a, "min_dwell").value_or(1);
        if (const AstArg* a = args.take_keyword("warmup"))
            warmup = arg_int(args, a, "warmup").value_or(0);
        if (args.bad || !lo_v || !hi_v)
            return nullptr;
        return make_step_bounded(*v, amounts, static_cast<int>(*lo_v),
                                 static_cast<int>(*hi_v), static_cast<int>(start),
                                 static_cast<unsigned>(dwell), static_cast<unsigned>(warmup));
    }

    MonitorPtr t_run_window(Args& args) {
        auto v = arg_var(args, args.take("a variable name"));
        auto value = arg_word(args, args.take("the watched value"), "the watched value");
        auto rmin = arg_int(args, args.take("the run minimum"), "the run minimum");
        auto rmax = arg_int(args, args.take("the run maximum"), "the run maximum");
        if (args.bad || !v || !value || !rmin || !rmax)
            return nullptr;
        return make_value_run_window(*v, *value, static_cast<unsigned>(*rmin),
                                     static_cast<unsigned>(*rmax));
    }

private:
    const MonitorSpec& spec_;
    CompileResult& result_;
    std::map<std::string, std::size_t> var_index_;
};

} // namespace

static CompileResult compile_names(const MonitorSpec& spec, const AstNameList& list) {
    CompileResult result;
    Compiler compiler(spec, result);

    // Resolve group aliases into a flat ordered monitor list.
    std::vector<std::pair<std::string, SourceLoc>> members;
    for (std::size_t i = 0; i < list.members.size(); ++i) {
        const auto& name = list.members[i];
        SourceLoc loc = i < list.member_locs.size() ? list.member_locs[i] : list.loc;
        const AstNameList* group = nullptr;
        for (const auto& g : spec.groups)
            if (g.name == name)
                group = &g;
        if (group) {
            for (std::size_t j = 0; j < group->members.size(); ++j)
                members.emplace_back(group->members[j], j < group->member_locs.size()
                                                            ? group->member_locs[j]
                                                            : group->loc);
        } else {
            members.emplace_back(name, loc);
        }
    }

    // Build each distinct monitor once.
    std::vector<std::string> order;
    std::map<std::string, MonitorPtr> built;
    for (const auto& [name, loc] : members) {
        if (built.count(name))
            continue;
        const AstMonitor* def = nullptr;
        for (const auto& m : spec.monitors)
            if (m.name == name)
                def = &m;
        if (!def) {
            compiler.error(loc, "unknown-monitor",
                           "composition references undefined monitor '" + name + "'");
            continue;
        }
        MonitorPtr monitor;
        try {
            monitor = compiler.build_monitor(*def);
        } catch (const Error& e) {
            compiler.error(def->loc, "bad-monitor", e.what());
        }
        if (monitor) {
            built[name] = monitor;
            order.push_back(name);
        }
    }
    if (!result.ok())
        return result;

    // Union-find over shared variables: connected components become factors.
    std::vector<int> parent(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const auto& a = built[order[i]]->alphabet();
            const auto& b = built[order[j]]->alphabet();
            bool shared = false;
            for (const auto& v : b->variables())
                if (a->has_variable(v.name))
                    shared = true;
            if (shared)
                parent[find(static_cast<int>(j))] = find(static_cast<int>(i));
        }

    std::vector<std::vector<std::string>> components;
    std::map<int, std::size_t> component_of_root;
    for (std::size_t i = 0; i < order.size(); ++i) {
        int root = find(static_cast<int>(i));
        auto it = component_of_root.find(root);
        if (it == component_of_root.end()) {
            component_of_root[root] = components.size();
            components.push_back({order[i]});
        } else {
            components[it->second].push_back(order[i]);
        }
    }

    for (const auto& names : components) {
        Factor f;
        f.members = names;
        std::vector<MonitorPtr> parts;
        for (const auto& n : names)
            parts.push_back(built[n]);
        try {
            f.monitor = conjoin_all(parts);
        } catch (const Error& e) {
            compiler.error(list.loc, "domain-mismatch", e.what());
            continue;
        }
        // a group hint naming exactly this member set labels the factor
        f.label = names.size() == 1 ? names[0] : "";
        for (const auto& g : spec.groups) {
            std::set<std::string> resolved;
            for (const auto& gm : g.members)
                resolved.insert(gm);
            if (resolved == std::set<std::string>(names.begin(), names.end()))
                f.label = g.name;
        }
        if (f.label.empty()) {
            for (const auto& n : names)
                f.label += (f.label.empty() ? "" : "&") + n;
        }
        result.factors.push_back(std::move(f));
    }
    return result;
}

CompileResult compile(const MonitorSpec& spec) {
    if (!spec.scenario) {
        CompileResult result;
        result.diagnostics.push_back({Diagnostic::Severity::error,
                                      {1, 1},
                                      "no-scenario",
                                      "the spec has no scenario composition to compile"});
        return result;
    }
    return compile_names(spec, *spec.scenario);
}

CompileResult compile_selection(const MonitorSpec& spec,
                                const std::vector<std::string>& names) {
    AstNameList list;
    list.loc = {0, 0};
    for (const auto& n : names) {
        list.members.push_back(n);
        list.member_locs.push_back({0, 0});
    }
    return compile_names(spec, list);
}

} // namespace scengen::dsl
