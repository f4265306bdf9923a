#pragma once

#include <stdexcept>
#include <string>

namespace scengen {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid domain data: unknown variable, value outside its domain,
// mismatched alphabets, malformed construction arguments.
class DomainError : public Error {
public:
    using Error::Error;
};

// The initial state of a monitor is unsafe: the monitor entails no trace
// and no scenario generator exists for it.
class NoTracesError : public Error {
public:
    using Error::Error;
};

// A configured resource limit (states, edges, table memory) was exceeded.
class ResourceLimitError : public Error {
public:
    using Error::Error;
};

// A trace index is outside [0, nb_traces(h)).
class OutOfBoundsError : public Error {
public:
    OutOfBoundsError() : Error("error index out of bounds") {}
    explicit OutOfBoundsError(const std::string& what) : Error(what) {}
};

// A trace prefix is not a prefix of the generator it was checked against.
class InvalidPrefixError : public Error {
public:
    InvalidPrefixError(std::size_t step, const std::string& what)
        : Error(what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

// A black-box monitor broke its contract (e.g. two visits to the same
// canonical state key reported different admissible inputs).
class ContractViolationError : public Error {
public:
    using Error::Error;
};

} // namespace scengen
