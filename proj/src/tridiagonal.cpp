#include "bdcat/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>

#include "bdcat/errors.hpp"

namespace bdcat {

namespace {

constexpr double kPivotFloor = 1e-300;   // below this even pivoting gives up
constexpr double kThomasGuard = 1e-10;   // relative pivot loss that triggers pivoting

/// Banded LU with row interchanges. Handles the (rare) systems where plain
/// Thomas elimination meets a vanishing pivot; row swaps introduce one extra
/// superdiagonal of fill-in.
std::vector<Complex> solve_pivoted(std::vector<Complex> dl, std::vector<Complex> d,
                                   std::vector<Complex> du, std::vector<Complex> b) {
    const std::size_t n = d.size();
    std::vector<Complex> du2(n >= 2 ? n - 2 : 0, Complex(0.0));
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (std::abs(d[k]) >= std::abs(dl[k])) {
            if (std::abs(d[k]) < kPivotFloor)
                throw SingularSystemError("tridiagonal solve: pivot underflow at row " +
                                          std::to_string(k));
            const Complex m = dl[k] / d[k];
            d[k + 1] -= m * du[k];
            b[k + 1] -= m * b[k];
            if (k + 2 < n) du2[k] = Complex(0.0);
        } else {
            // interchange rows k and k+1; the old superdiagonal of row k+1
            // becomes fill-in two columns right of the new pivot
            const Complex m = d[k] / dl[k];
            d[k] = dl[k];
            const Complex tmp = d[k + 1];
            d[k + 1] = du[k] - m * tmp;
            if (k + 2 < n) {
                du2[k] = du[k + 1];
                du[k + 1] = -m * du2[k];
            }
            du[k] = tmp;
            std::swap(b[k], b[k + 1]);
            b[k + 1] -= m * b[k];
        }
    }
    if (std::abs(d[n - 1]) < kPivotFloor)
        throw SingularSystemError("tridiagonal solve: pivot underflow at last row");

    std::vector<Complex> x(n);
    x[n - 1] = b[n - 1] / d[n - 1];
    if (n >= 2) x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for (std::size_t i = n; i-- > 0;) {
        if (i + 2 >= n) continue;  // last two rows handled above
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    return x;
}

} // namespace

std::vector<Complex> solve_tridiagonal(const std::vector<Complex>& lower,
                                       const std::vector<Complex>& diag,
                                       const std::vector<Complex>& upper,
                                       const std::vector<Complex>& rhs) {
    const std::size_t n = diag.size();
    if (n == 0) throw std::invalid_argument("solve_tridiagonal: empty system");
    if (lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n)
        throw std::invalid_argument("solve_tridiagonal: band/rhs sizes do not match the diagonal");

    if (n == 1) {
        if (std::abs(diag[0]) < kPivotFloor)
            throw SingularSystemError("tridiagonal solve: 1x1 pivot underflow");
        return {rhs[0] / diag[0]};
    }

    // Thomas recurrence; bail out to the pivoting path on pivot loss.
    std::vector<Complex> cp(n - 1), bp(n);
    Complex pivot = diag[0];
    if (std::abs(pivot) < kThomasGuard * (std::abs(diag[0]) + std::abs(upper[0])) ||
        std::abs(pivot) < kPivotFloor) {
        return solve_pivoted(lower, diag, upper, rhs);
    }
    cp[0] = upper[0] / pivot;
    bp[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i - 1] * cp[i - 1];
        const double scale =
            std::abs(diag[i]) + std::abs(lower[i - 1]) + (i < n - 1 ? std::abs(upper[i]) : 0.0);
        if (std::abs(pivot) < kThomasGuard * scale || std::abs(pivot) < kPivotFloor) {
            return solve_pivoted(lower, diag, upper, rhs);
        }
        if (i < n - 1) cp[i] = upper[i] / pivot;
        bp[i] = (rhs[i] - lower[i - 1] * bp[i - 1]) / pivot;
    }
    std::vector<Complex> x(n);
    x[n - 1] = bp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = bp[i] - cp[i] * x[i + 1];
    return x;
}

std::vector<Complex> multiply_tridiagonal(const std::vector<Complex>& lower,
                                          const std::vector<Complex>& diag,
                                          const std::vector<Complex>& upper,
                                          const std::vector<Complex>& x) {
    const std::size_t n = diag.size();
    if (lower.size() != n - 1 || upper.size() != n - 1 || x.size() != n || n == 0)
        throw std::invalid_argument("multiply_tridiagonal: band/vector sizes do not match");
    std::vector<Complex> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex v = diag[i] * x[i];
        if (i > 0) v += lower[i - 1] * x[i - 1];
        if (i + 1 < n) v += upper[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

} // namespace bdcat
