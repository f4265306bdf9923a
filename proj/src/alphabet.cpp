#include "scengen/alphabet.hpp"

#include <algorithm>
#include <unordered_set>

#include "scengen/errors.hpp"

namespace scengen {

Alphabet::Alphabet(std::vector<VariableDecl> vars) : vars_(std::move(vars)) {
    if (vars_.empty())
        throw DomainError("alphabet needs at least one variable");
    std::unordered_set<std::string> seen;
    for (const auto& v : vars_) {
        if (v.name.empty())
            throw DomainError("variable name must not be empty");
        if (!seen.insert(v.name).second)
            throw DomainError("duplicate variable '" + v.name + "'");
        if (v.domain.empty())
            throw DomainError("variable '" + v.name + "' has an empty domain");
        std::unordered_set<std::string> vals;
        for (const auto& val : v.domain)
            if (!vals.insert(val).second)
                throw DomainError("variable '" + v.name + "' repeats domain value '" + val + "'");
    }
    weights_.assign(vars_.size(), 1);
    for (std::size_t i = vars_.size(); i-- > 0;) {
        if (i + 1 < vars_.size()) {
            std::uint64_t below = weights_[i + 1];
            std::uint64_t dom = vars_[i + 1].domain.size();
            if (below != 0 && dom > UINT64_MAX / below)
                fits_u64_ = false;
            weights_[i] = fits_u64_ ? below * dom : 0;
        }
        std::uint64_t dom = vars_[i].domain.size();
        if (fits_u64_ && dom > UINT64_MAX / std::max<std::uint64_t>(size_, 1))
            fits_u64_ = false;
        if (fits_u64_)
            size_ *= dom;
    }
}

std::optional<std::size_t> Alphabet::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name)
            return i;
    return std::nullopt;
}

std::uint64_t Alphabet::size() const {
    if (!fits_u64_)
        throw DomainError("input space size exceeds 64 bits");
    return size_;
}

std::uint64_t Alphabet::rank(const std::vector<std::uint32_t>& values) const {
    if (!fits_u64_)
        throw DomainError("cannot rank assignments of an input space larger than 2^64");
    if (values.size() != vars_.size())
        throw DomainError("assignment arity mismatch");
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (values[i] >= vars_[i].domain.size())
            throw DomainError("value index out of range for variable '" + vars_[i].name + "'");
        r += weights_[i] * values[i];
    }
    return r;
}

std::vector<std::uint32_t> Alphabet::unrank(std::uint64_t rank) const {
    if (!fits_u64_ || rank >= size_)
        throw DomainError("input rank out of range");
    std::vector<std::uint32_t> values(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        values[i] = static_cast<std::uint32_t>(rank / weights_[i]);
        rank %= weights_[i];
    }
    return values;
}

std::optional<std::uint32_t> Alphabet::value_index(std::size_t var, const std::string& value) const {
    const auto& dom = vars_.at(var).domain;
    auto it = std::find(dom.begin(), dom.end(), value);
    if (it == dom.end())
        return std::nullopt;
    return static_cast<std::uint32_t>(it - dom.begin());
}

bool Alphabet::operator==(const Alphabet& other) const {
    if (vars_.size() != other.vars_.size())
        return false;
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name != other.vars_[i].name || vars_[i].domain != other.vars_[i].domain)
            return false;
    return true;
}

AlphabetPtr make_alphabet(std::vector<VariableDecl> vars) {
    return std::make_shared<const Alphabet>(std::move(vars));
}

Assignment::Assignment(AlphabetPtr alphabet, std::vector<std::uint32_t> values)
    : alphabet_(std::move(alphabet)), values_(std::move(values)) {
    if (values_.size() != alphabet_->arity())
        throw DomainError("assignment arity mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] >= alphabet_->variables()[i].domain.size())
            throw DomainError("value index out of range for variable '" +
                              alphabet_->variables()[i].name + "'");
}

Assignment Assignment::from_bindings(
    AlphabetPtr alphabet,
    const std::vector<std::pair<std::string, std::string>>& bindings) {
    std::vector<std::uint32_t> values(alphabet->arity(), UINT32_MAX);
    for (const auto& [name, value] : bindings) {
        auto idx = alphabet->index_of(name);
        if (!idx)
            throw DomainError("unknown variable '" + name + "'");
        auto vi = alphabet->value_index(*idx, value);
        if (!vi)
            throw DomainError("value '" + value + "' not in domain of '" + name + "'");
        if (values[*idx] != UINT32_MAX)
            throw DomainError("variable '" + name + "' bound twice");
        values[*idx] = *vi;
    }
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == UINT32_MAX)
            throw DomainError("variable '" + alphabet->variables()[i].name + "' is unbound");
    return Assignment(std::move(alphabet), std::move(values));
}

const std::string& Assignment::value_of(const std::string& var) const {
    auto idx = alphabet_->index_of(var);
    if (!idx)
        throw DomainError("unknown variable '" + var + "'");
    return alphabet_->variables()[*idx].domain[values_[*idx]];
}

std::string Assignment::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i)
            out += ' ';
        out += alphabet_->variables()[i].name;
        out += '=';
        out += alphabet_->variables()[i].domain[values_[i]];
    }
    return out;
}

bool Assignment::operator==(const Assignment& other) const {
    return *alphabet_ == *other.alphabet_ && values_ == other.values_;
}

bool Assignment::operator<(const Assignment& other) const {
    if (*alphabet_ != *other.alphabet_)
        throw DomainError("cannot order assignments over different alphabets");
    return values_ < other.values_;
}

Assignment project(const Assignment& u, const std::vector<std::string>& names) {
    const auto& full = u.alphabet();
    std::vector<bool> keep(full->arity(), false);
    for (const auto& n : names) {
        auto idx = full->index_of(n);
        if (!idx)
            throw DomainError("cannot project onto unknown variable '" + n + "'");
        keep[*idx] = true;
    }
    std::vector<VariableDecl> vars;
    std::vector<std::uint32_t> values;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (!keep[i])
            continue;
        vars.push_back(full->variables()[i]);
        values.push_back(u.values()[i]);
    }
    return Assignment(make_alphabet(std::move(vars)), std::move(values));
}

TracePrefix::TracePrefix(AlphabetPtr alphabet, std::vector<std::vector<std::uint32_t>> steps)
    : alphabet_(std::move(alphabet)), steps_(std::move(steps)) {
    for (const auto& row : steps_)
        if (row.size() != alphabet_->arity())
            throw DomainError("trace step arity mismatch");
}

void TracePrefix::append(const Assignment& u) {
    if (*u.alphabet() != *alphabet_)
        throw DomainError("trace step over a different alphabet");
    steps_.push_back(u.values());
}

void TracePrefix::append_rank(std::uint64_t input_rank) {
    steps_.push_back(alphabet_->unrank(input_rank));
}

Assignment TracePrefix::step_assignment(std::size_t i) const {
    return Assignment(alphabet_, steps_.at(i));
}

bool TracePrefix::operator==(const TracePrefix& other) const {
    return *alphabet_ == *other.alphabet_ && steps_ == other.steps_;
}

bool TracePrefix::operator<(const TracePrefix& other) const {
    if (*alphabet_ != *other.alphabet_)
        throw DomainError("cannot order traces over different alphabets");
    return steps_ < other.steps_;
}

TracePrefix project(const TracePrefix& p, const std::vector<std::string>& names) {
    const auto& full = p.alphabet();
    std::vector<std::size_t> cols;
    std::vector<VariableDecl> vars;
    for (std::size_t i = 0; i < full->arity(); ++i) {
        const auto& v = full->variables()[i];
        if (std::find(names.begin(), names.end(), v.name) != names.end()) {
            cols.push_back(i);
            vars.push_back(v);
        }
    }
    for (const auto& n : names)
        if (!full->has_variable(n))
            throw DomainError("cannot project onto unknown variable '" + n + "'");
    std::vector<std::vector<std::uint32_t>> steps;
    steps.reserve(p.length());
    for (const auto& row : p.steps()) {
        std::vector<std::uint32_t> out;
        out.reserve(cols.size());
        for (auto c : cols)
            out.push_back(row[c]);
        steps.push_back(std::move(out));
    }
    return TracePrefix(make_alphabet(std::move(vars)), std::move(steps));
}

} // namespace scengen
