#pragma once

#include <complex>
#include <vector>

namespace bdcat {

using Complex = std::complex<double>;

/// Solves the tridiagonal system T x = rhs, where T has main diagonal
/// `diag` (size n), subdiagonal `lower` (size n-1, lower[i] sits in row i+1)
/// and superdiagonal `upper` (size n-1, upper[i] sits in row i).
///
/// The fast path is the Thomas recurrence; if an eliminated pivot loses too
/// much magnitude relative to the row it came from, the solve restarts with
/// a banded LU with partial pivoting. Throws SingularSystemError when even
/// the pivoted elimination meets a pivot below 1e-300, and std::invalid_argument
/// on mismatched sizes or an empty system.
std::vector<Complex> solve_tridiagonal(const std::vector<Complex>& lower,
                                       const std::vector<Complex>& diag,
                                       const std::vector<Complex>& upper,
                                       const std::vector<Complex>& rhs);

/// T x for the same band layout; used for residual checks.
std::vector<Complex> multiply_tridiagonal(const std::vector<Complex>& lower,
                                          const std::vector<Complex>& diag,
                                          const std::vector<Complex>& upper,
                                          const std::vector<Complex>& x);

} // namespace bdcat
