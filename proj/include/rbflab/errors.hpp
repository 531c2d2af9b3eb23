#pragma once

#include <stdexcept>
#include <string>

namespace rbflab {

// Bad arguments, bad configuration, violated preconditions. CLI maps this
// to exit code 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// The candidate grid (or another discretization) is too coarse for the
// requested scale.
class ResolutionError : public UsageError {
public:
    explicit ResolutionError(const std::string& msg) : UsageError(msg) {}
};

// Numerical failure at runtime (factorization breakdown, divergence).
// CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Factorization failed even after the regularization fallback. Carries the
// diagnostics a caller needs to judge how ill-conditioned the system was.
class ConditioningError : public NumericalError {
public:
    ConditioningError(const std::string& msg, double min_eig_estimate, double separation)
        : NumericalError(msg), min_eig_estimate(min_eig_estimate), separation(separation) {}

    double min_eig_estimate;
    double separation;
};

}  // namespace rbflab
