#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace presic {

/// Invalid input: wrong shapes, parameters outside their admissible range,
/// malformed problem files. Maps to CLI exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arithmetic failure while evaluating an operator, metric or expression
/// (division by zero, log of a non-positive number, non-finite results).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operator output left the sampling box while strict domain checking
/// was requested.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every sampled tuple had a zero comparator, so no ratio could be formed.
class DegenerateDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse failure in the expression language. Line and column are 1-based.
class DslError : public UsageError {
public:
    enum class Kind { syntax, unknown_identifier, index_out_of_range, bad_call };

    DslError(Kind kind, std::size_t line, std::size_t column, const std::string& what)
        : UsageError(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          kind_(kind), line_(line), column_(column) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    Kind kind_;
    std::size_t line_;
    std::size_t column_;
};

} // namespace presic
