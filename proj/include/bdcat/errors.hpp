#pragma once

#include <stdexcept>
#include <string>

namespace bdcat {

/// Invalid configuration input: malformed JSON, unknown keys, out-of-range
/// scalar settings. Maps to process exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally invalid model or a request outside an operation's domain
/// (e.g. catastrophe-only quantities on a model with alpha = beta = 0).
/// Maps to process exit code 2.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: truncation did not converge, a pivot or denominator
/// underflowed, quadrature or inversion could not reach tolerance.
/// Maps to process exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Truncation level hit its cap before the convergence test passed.
class TruncationError : public NumericError {
public:
    explicit TruncationError(const std::string& what) : NumericError(what) {}
};

/// A tridiagonal pivot fell below the representable floor even with pivoting.
class SingularSystemError : public NumericError {
public:
    explicit SingularSystemError(const std::string& what) : NumericError(what) {}
};

/// A closed-form denominator (normalizing factor, 2x2 determinant) underflowed.
class SingularDenominatorError : public NumericError {
public:
    explicit SingularDenominatorError(const std::string& what) : NumericError(what) {}
};

/// Adaptive quadrature exhausted its refinement budget.
class QuadratureError : public NumericError {
public:
    explicit QuadratureError(const std::string& what) : NumericError(what) {}
};

/// Laplace inversion or a limit extrapolation failed a self-consistency check.
class InversionError : public NumericError {
public:
    explicit InversionError(const std::string& what) : NumericError(what) {}
};

} // namespace bdcat
