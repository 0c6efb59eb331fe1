#pragma once

#include <stdexcept>
#include <string>

namespace fracquad {

/// Thrown when a kernel is evaluated pointwise at a singular argument
/// (e.g. t = 0 for t^{alpha-1}); moment integration must be used instead.
class SingularEvaluationError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown for scheme orders outside the supported range.  Orders 6 and 7
/// are constructible only through the stability-analysis path.
class UnsupportedOrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when adaptive quadrature cannot reach the requested tolerance
/// within the subdivision budget.  Carries the achieved error estimate.
class AccuracyFailure : public std::runtime_error {
public:
    AccuracyFailure(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error_(achieved) {}

    double achieved_error() const { return achieved_error_; }

private:
    double achieved_error_;
};

/// Thrown by the time-stepping solvers when the implicit step matrix
/// (or scalar 1 - w_n) is numerically singular.  Carries the step index.
class NonInvertibleStepError : public std::runtime_error {
public:
    NonInvertibleStepError(const std::string& what, std::size_t step)
        : std::runtime_error(what), step_(step) {}

    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

} // namespace fracquad
