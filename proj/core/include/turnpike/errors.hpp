#pragma once

#include <stdexcept>
#include <string>

namespace turnpike {

/// Malformed inputs: dimension mismatches, non-finite entries, bad options.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// A solver precondition taken from the theory does not hold for the given
/// problem (A singular, pair not stabilizable/detectable, ...). The message
/// names the violated hypothesis.
class HypothesisViolation : public std::runtime_error {
public:
    explicit HypothesisViolation(const std::string& what) : std::runtime_error(what) {}
};

/// The computation itself broke down: NaNs in iterates, singular subspace
/// bases, no convergence where convergence is required.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Problem-file syntax errors, with 1-based position information.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, int column)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace turnpike
