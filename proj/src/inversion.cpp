#include "bdcat/inversion.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "bdcat/errors.hpp"

namespace bdcat {

void InversionSettings::validate() const {
    if (!std::isfinite(decay) || decay <= 0.0) {
        throw ConfigError("inversion decay must be positive and finite");
    }
    if (terms < 1) {
        throw ConfigError("inversion needs at least one partial sum");
    }
    if (average_terms < 2) {
        throw ConfigError("Euler averaging needs at least two partial sums");
    }
    if (!std::isfinite(tol) || tol <= 0.0) {
        throw ConfigError("inversion tolerance must be positive and finite");
    }
}

double invert_laplace(const std::function<Complex(Complex)>& transform, double t,
                      const InversionSettings& settings) {
    settings.validate();
    if (!std::isfinite(t) || t <= 0.0) {
        std::ostringstream msg;
        msg << "inversion time must be positive and finite, got " << t;
        throw DomainError(msg.str());
    }

    const double decay = settings.decay;
    const int first_averaged = settings.terms;
    const int extra = settings.average_terms - 1;
    const int last_term = first_averaged + extra;

    // Alternating series along the contour Re(s) = decay / (2t). partial[j]
    // is the sum of terms 0..j; the binomial average of the tail of this
    // sequence is the Euler-accelerated value.
    const double pi = std::acos(-1.0);
    std::vector<double> partial(static_cast<std::size_t>(last_term) + 1);
    double running = 0.5 * transform(Complex(decay / (2.0 * t), 0.0)).real();
    partial[0] = running;
    double sign = -1.0;
    for (int k = 1; k <= last_term; ++k) {
        const Complex node(decay / (2.0 * t), k * pi / t);
        running += sign * transform(node).real();
        partial[static_cast<std::size_t>(k)] = running;
        sign = -sign;
    }

    // Binomial averages of partial[first_averaged .. first_averaged + m] for
    // m = extra and m = extra - 1; their gap estimates the settling error.
    const auto euler_average = [&](int m) {
        double coeff = std::ldexp(1.0, -m);  // C(m, 0) / 2^m
        double sum = 0.0;
        for (int k = 0; k <= m; ++k) {
            sum += coeff * partial[static_cast<std::size_t>(first_averaged + k)];
            coeff *= static_cast<double>(m - k) / static_cast<double>(k + 1);
        }
        return sum;
    };
    const double averaged = euler_average(extra);
    const double previous = euler_average(extra - 1);

    const double prefactor = std::exp(decay / 2.0) / t;
    const double value = prefactor * averaged;
    const double settle = prefactor * std::abs(averaged - previous);
    if (!std::isfinite(value)) {
        throw InversionError("transform inversion produced a non-finite value");
    }
    if (settle > settings.tol) {
        std::ostringstream msg;
        msg << "Euler averages did not settle: estimated error " << settle << " exceeds tolerance "
            << settings.tol << " at t = " << t;
        throw InversionError(msg.str());
    }
    return value;
}

}  // namespace bdcat
