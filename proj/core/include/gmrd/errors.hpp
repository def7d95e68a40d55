#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gmrd {

// Precondition or argument violation (bad sizes, negative coefficients, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Evaluation outside the domain of a formula, e.g. v <= -1 in the reaction.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A request that would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, std::size_t required)
        : std::runtime_error(what), required_(required) {}
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t required_;
};

// Time integration produced a non-finite or otherwise invalid state.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time, double norm)
        : std::runtime_error(what), time_(time), norm_(norm) {}
    double time() const noexcept { return time_; }
    double norm() const noexcept { return norm_; }

private:
    double time_;
    double norm_;
};

// An iterative method (CG, Newton, inverse iteration) failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> residuals)
        : std::runtime_error(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

// Malformed configuration text. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace gmrd
