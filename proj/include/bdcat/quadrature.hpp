#pragma once

#include <functional>
#include <vector>

namespace bdcat {

/// Adaptive integration settings: per-call absolute tolerance on the whole
/// interval, distributed over subintervals proportionally to length.
struct QuadratureSettings {
    double abs_tol = 1e-8;
    int max_depth = 40;  // bisection depth before giving up

    void validate() const;  // throws ConfigError on nonsense settings
};

/// Integrates a vector-valued function over [a, b] with adaptive bisection;
/// each panel uses a fixed-order Gauss-Legendre rule and is accepted when
/// halving it moves the panel value (sup-norm) by less than its share of the
/// tolerance. All evaluations of f must return vectors of equal length.
/// Throws QuadratureError when max_depth is exhausted on some panel.
std::vector<double> integrate_adaptive(const std::function<std::vector<double>(double)>& f,
                                       double a, double b,
                                       const QuadratureSettings& settings = {});

double integrate_adaptive_scalar(const std::function<double(double)>& f, double a, double b,
                                 const QuadratureSettings& settings = {});

} // namespace bdcat
