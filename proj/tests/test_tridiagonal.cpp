#include <doctest.h>

#include <cmath>
#include <vector>

#include "bdcat/errors.hpp"
#include "bdcat/rng.hpp"
#include "bdcat/tridiagonal.hpp"

using bdcat::Complex;

namespace {

double residual_inf(const std::vector<Complex>& lower, const std::vector<Complex>& diag,
                    const std::vector<Complex>& upper, const std::vector<Complex>& x,
                    const std::vector<Complex>& rhs) {
    const auto ax = bdcat::multiply_tridiagonal(lower, diag, upper, x);
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        worst = std::max(worst, std::abs(ax[i] - rhs[i]));
        scale = std::max(scale, std::abs(rhs[i]));
    }
    return worst / std::max(scale, 1e-300);
}

} // namespace

TEST_CASE("identity system returns the right-hand side") {
    const std::vector<Complex> lower(3, 0.0);
    const std::vector<Complex> diag(4, 1.0);
    const std::vector<Complex> upper(3, 0.0);
    const std::vector<Complex> rhs{0.0, 1.0, 0.0, 0.0};
    const auto x = bdcat::solve_tridiagonal(lower, diag, upper, rhs);
    REQUIRE(x.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(x[i] - rhs[i]) == 0.0);
}

TEST_CASE("two by two system matches the hand solution") {
    // [[2,-1],[-1,2]] x = [1,0]  =>  x = [2/3, 1/3]
    const auto x = bdcat::solve_tridiagonal({-1.0}, {2.0, 2.0}, {-1.0}, {1.0, 0.0});
    CHECK(std::abs(x[0] - 2.0 / 3.0) < 1e-15);
    CHECK(std::abs(x[1] - 1.0 / 3.0) < 1e-15);
}

TEST_CASE("dimension one") {
    const auto x = bdcat::solve_tridiagonal({}, {Complex(0.0, 2.0)}, {}, {Complex(1.0, 0.0)});
    CHECK(std::abs(x[0] - Complex(0.0, -0.5)) < 1e-15);
}

TEST_CASE("random diagonally dominant systems solve to tiny residual") {
    auto g = bdcat::Xoshiro256pp::seeded(404);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 50;
        std::vector<Complex> lower(n - 1), diag(n), upper(n - 1), rhs(n);
        for (auto& v : lower) v = Complex(g.uniform01() - 0.5, g.uniform01() - 0.5);
        for (auto& v : upper) v = Complex(g.uniform01() - 0.5, g.uniform01() - 0.5);
        for (auto& v : rhs) v = Complex(2.0 * g.uniform01() - 1.0, 2.0 * g.uniform01() - 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double row = (i > 0 ? std::abs(lower[i - 1]) : 0.0) +
                               (i + 1 < n ? std::abs(upper[i]) : 0.0);
            diag[i] = Complex(row + 1.0 + g.uniform01(), g.uniform01() - 0.5);
        }
        const auto x = bdcat::solve_tridiagonal(lower, diag, upper, rhs);
        CHECK(residual_inf(lower, diag, upper, x, rhs) < 1e-12);
    }
}

TEST_CASE("zero leading pivot is handled by row exchange") {
    // [[0,1],[1,1]] x = [1,0]  =>  x = [-1, 1]; the plain Thomas recurrence
    // would divide by zero on the first pivot.
    const auto x = bdcat::solve_tridiagonal({1.0}, {0.0, 1.0}, {1.0}, {1.0, 0.0});
    CHECK(std::abs(x[0] - Complex(-1.0)) < 1e-14);
    CHECK(std::abs(x[1] - Complex(1.0)) < 1e-14);
}

TEST_CASE("singular system is rejected") {
    CHECK_THROWS_AS(bdcat::solve_tridiagonal({0.0}, {0.0, 0.0}, {0.0}, {1.0, 0.0}),
                    bdcat::SingularSystemError);
    // Rank-deficient but with nonzero entries: second row is a multiple of
    // the first after elimination.
    CHECK_THROWS_AS(bdcat::solve_tridiagonal({2.0}, {1.0, 4.0}, {2.0}, {1.0, 1.0}),
                    bdcat::SingularSystemError);
}

TEST_CASE("mismatched band lengths are rejected") {
    CHECK_THROWS_AS(bdcat::solve_tridiagonal({1.0, 1.0}, {1.0, 1.0}, {1.0}, {1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(bdcat::solve_tridiagonal({}, {}, {}, {}), std::invalid_argument);
}
