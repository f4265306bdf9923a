#include "scengen/product.hpp"

#include "scengen/errors.hpp"

namespace scengen {

TracePrefix pair_traces(const TracePrefix& a, const TracePrefix& b) {
    if (a.length() != b.length())
        throw DomainError("cannot pair traces of different lengths");
    std::vector<VariableDecl> vars = a.alphabet()->variables();
    for (const auto& v : b.alphabet()->variables()) {
        if (a.alphabet()->has_variable(v.name))
            throw DomainError("cannot pair traces sharing variable '" + v.name + "'");
        vars.push_back(v);
    }
    std::vector<std::vector<std::uint32_t>> steps;
    steps.reserve(a.length());
    for (std::size_t t = 0; t < a.length(); ++t) {
        std::vector<std::uint32_t> row = a.steps()[t];
        const auto& brow = b.steps()[t];
        row.insert(row.end(), brow.begin(), brow.end());
        steps.push_back(std::move(row));
    }
    return TracePrefix(make_alphabet(std::move(vars)), std::move(steps));
}

SGTuple::SGTuple(std::vector<ScenarioGeneratorPtr> factors, CountTablesConfig config)
    : factors_(std::move(factors)) {
    if (factors_.empty())
        throw DomainError("a tuple needs at least one factor");
    std::vector<VariableDecl> vars;
    for (const auto& f : factors_) {
        for (const auto& v : f->alphabet()->variables()) {
            for (const auto& seen : vars)
                if (seen.name == v.name)
                    throw DomainError("tuple factors must have pairwise disjoint variables; '" +
                                      v.name + "' appears twice");
            vars.push_back(v);
        }
        tables_.push_back(std::make_unique<CountTables>(f->graph, config));
    }
    alphabet_ = make_alphabet(std::move(vars));
}

const BigCount& SGTuple::nb_traces(std::size_t h) {
    if (h < cached_totals_.size())
        return cached_totals_[h];
    for (std::size_t k = cached_totals_.size(); k <= h; ++k) {
        BigCount total = 1;
        for (auto& t : tables_)
            total *= t->nb_traces(k);
        cached_totals_.push_back(std::move(total));
    }
    return cached_totals_[h];
}

TracePrefix SGTuple::trace(const BigCount& i, std::size_t h) {
    if (i < 0 || i >= nb_traces(h))
        throw OutOfBoundsError();
    // Mixed-radix digits, least significant (= last factor) first.
    std::vector<BigCount> digits(factors_.size());
    BigCount rem = i;
    for (std::size_t f = factors_.size(); f-- > 0;) {
        const BigCount& n = tables_[f]->nb_traces(h);
        digits[f] = rem % n;
        rem /= n;
    }
    TracePrefix combined = tables_[0]->trace(digits[0], h);
    for (std::size_t f = 1; f < factors_.size(); ++f)
        combined = pair_traces(combined, tables_[f]->trace(digits[f], h));
    return combined;
}

BigCount SGTuple::rank(const TracePrefix& p) {
    if (*p.alphabet() != *alphabet_)
        throw InvalidPrefixError(0, "prefix alphabet does not match the tuple's");
    const std::size_t h = p.length();
    BigCount acc = 0;
    for (std::size_t f = 0; f < factors_.size(); ++f) {
        const auto& falpha = factors_[f]->alphabet();
        std::vector<std::string> names;
        for (const auto& v : falpha->variables())
            names.push_back(v.name);
        TracePrefix part = project(p, names);
        acc = acc * tables_[f]->nb_traces(h) + tables_[f]->rank(part);
    }
    return acc;
}

} // namespace scengen
