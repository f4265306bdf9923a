#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace scengen {

// One input variable: a name and its ordered finite domain of symbolic values.
// The declared domain order is total and defines the value order used
// everywhere (ranking, unranking, admissible-list order).
struct VariableDecl {
    std::string name;
    std::vector<std::string> domain;
};

// An ordered set of variable declarations. Defines the input space U_V as the
// cross product of the domains, ordered lexicographically by variable
// declaration order, then domain order. Assignments are ranked by that order:
// the rank of an assignment is its mixed-radix encoding, most significant
// digit first.
class Alphabet {
public:
    explicit Alphabet(std::vector<VariableDecl> vars);

    const std::vector<VariableDecl>& variables() const { return vars_; }
    std::size_t arity() const { return vars_.size(); }

    std::optional<std::size_t> index_of(const std::string& name) const;
    bool has_variable(const std::string& name) const { return index_of(name).has_value(); }

    // |U_V|. Throws DomainError if the product does not fit in 64 bits.
    std::uint64_t size() const;
    bool size_fits_u64() const { return fits_u64_; }

    // Rank of a value tuple (one value index per variable, declaration order).
    std::uint64_t rank(const std::vector<std::uint32_t>& values) const;
    std::vector<std::uint32_t> unrank(std::uint64_t rank) const;

    std::optional<std::uint32_t> value_index(std::size_t var, const std::string& value) const;

    bool operator==(const Alphabet& other) const;
    bool operator!=(const Alphabet& other) const { return !(*this == other); }

private:
    std::vector<VariableDecl> vars_;
    std::vector<std::uint64_t> weights_; // weights_[i] = prod of domain sizes after i
    std::uint64_t size_ = 1;
    bool fits_u64_ = true;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

AlphabetPtr make_alphabet(std::vector<VariableDecl> vars);

// A total assignment of the variables of one alphabet.
class Assignment {
public:
    Assignment(AlphabetPtr alphabet, std::vector<std::uint32_t> values);

    // Parses named bindings like {{"v1","a"},{"v2","b"}}; every variable of
    // the alphabet must be bound exactly once.
    static Assignment from_bindings(
        AlphabetPtr alphabet,
        const std::vector<std::pair<std::string, std::string>>& bindings);

    const AlphabetPtr& alphabet() const { return alphabet_; }
    const std::vector<std::uint32_t>& values() const { return values_; }

    const std::string& value_of(const std::string& var) const;
    std::uint64_t rank() const { return alphabet_->rank(values_); }

    std::string to_string() const; // "v1=a v2=b"

    bool operator==(const Assignment& other) const;
    bool operator!=(const Assignment& other) const { return !(*this == other); }
    // Lexicographic by variable declaration order, then domain order.
    bool operator<(const Assignment& other) const;

private:
    AlphabetPtr alphabet_;
    std::vector<std::uint32_t> values_;
};

// Restriction of `u` to the named variables, which keep their relative
// declaration order. Throws DomainError on names not bound in `u`.
Assignment project(const Assignment& u, const std::vector<std::string>& names);

// A finite sequence of assignments over one alphabet; the unit of extraction,
// sampling and file output. Stored compactly as value-index rows.
class TracePrefix {
public:
    explicit TracePrefix(AlphabetPtr alphabet)
        : alphabet_(std::move(alphabet)) {}
    TracePrefix(AlphabetPtr alphabet, std::vector<std::vector<std::uint32_t>> steps);

    const AlphabetPtr& alphabet() const { return alphabet_; }
    std::size_t length() const { return steps_.size(); }
    const std::vector<std::vector<std::uint32_t>>& steps() const { return steps_; }

    void append(const Assignment& u);
    void append_rank(std::uint64_t input_rank);
    Assignment step_assignment(std::size_t i) const;

    bool operator==(const TracePrefix& other) const;
    bool operator!=(const TracePrefix& other) const { return !(*this == other); }
    bool operator<(const TracePrefix& other) const;

private:
    AlphabetPtr alphabet_;
    std::vector<std::vector<std::uint32_t>> steps_;
};

// Pointwise restriction of every step of `p` to the named variables.
TracePrefix project(const TracePrefix& p, const std::vector<std::string>& names);

} // namespace scengen
