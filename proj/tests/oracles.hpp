#pragma once

// Independent reference computations for the tests. Everything here avoids
// the library's own solvers on purpose: the dense route goes through Eigen's
// LU (only included where a test target adds the Eigen include path), and
// the closed forms are evaluated from scratch.

#include <cmath>
#include <complex>
#include <vector>

#include "bdcat/rates.hpp"
#include "bdcat/rng.hpp"
#include "bdcat/tridiagonal.hpp"

namespace oracle {

/// Closed-form base resolvent entry (0,0) for constant rates: with
/// r the smaller root of mu*r^2 - (s+lam+mu)*r + lam = 0, the value is
/// 1 / (s + lam - mu*r).
inline double constant_rate_resolvent00(double lam, double mu, double s) {
    const double b = s + lam + mu;
    const double r = (b - std::sqrt(b * b - 4.0 * lam * mu)) / (2.0 * mu);
    return 1.0 / (s + lam - mu * r);
}

/// Strictly positive random table schedule for property tests.
inline bdcat::RateSchedule random_table_schedule(bdcat::Xoshiro256pp& g, int length) {
    std::vector<double> birth(static_cast<std::size_t>(length));
    std::vector<double> death(static_cast<std::size_t>(length));
    for (auto& v : birth) v = 0.2 + 2.8 * g.uniform01();
    for (auto& v : death) v = 0.2 + 2.8 * g.uniform01();
    return bdcat::RateSchedule::table(birth, death);
}

} // namespace oracle
