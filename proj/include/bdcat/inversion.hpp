#pragma once

#include <functional>

#include "bdcat/tridiagonal.hpp"

namespace bdcat {

/// Parameters of the Euler-summation Bromwich inversion. `decay` fixes the
/// contour (discretization error is of order exp(-decay)); `terms` partial
/// sums are computed and the final value is the binomial average of the last
/// `average_terms` of them. The defaults target absolute accuracy near 1e-8
/// for transforms of bounded functions.
struct InversionSettings {
    double decay = 21.0;
    int terms = 31;
    int average_terms = 15;
    double tol = 1e-8;  // settling tolerance of the Euler averages

    void validate() const;  // throws ConfigError on nonsense settings
};

/// Inverts a Laplace transform at time t > 0 by alternating-series Euler
/// summation along a shifted contour. The transform must be evaluable for
/// Re(s) > 0. Throws InversionError when the Euler averages fail to settle
/// within settings.tol (oscillation diagnostic), DomainError for t <= 0.
double invert_laplace(const std::function<Complex(Complex)>& transform, double t,
                      const InversionSettings& settings = {});

} // namespace bdcat
