#pragma once

#include <stdexcept>
#include <string>

namespace dshock {

// Bad argument or configuration supplied by the caller.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input outside the mathematical domain of an operation (non-finite y,
// rho <= 0, t past the lifespan, particle leaving the grid, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Iterative solver failed to converge.
struct SolverError : std::runtime_error {
    SolverError(const std::string& what, double final_residual)
        : std::runtime_error(what), residual(final_residual) {}
    double residual;
};

// Quadrature or root bracketing failure.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Not enough resolved samples for a fit.
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Modulation denominator d^3u(xi) too small.
struct SingularDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dshock
