#include "bdcat/first_catastrophe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "bdcat/errors.hpp"
#include "catastrophe_internal.hpp"

namespace bdcat {

namespace {

void require_catastrophes(const CatastropheRates& cat) {
    if (!(cat.total() > 0.0)) {
        throw DomainError("first-catastrophe statistics need alpha + beta > 0; "
                          "without catastrophes the waiting time is infinite");
    }
}

void require_positive_time(double t) {
    if (!std::isfinite(t) || t <= 0.0) {
        std::ostringstream msg;
        msg << "time must be positive and finite, got " << t;
        throw DomainError(msg.str());
    }
}

// Frequency grid for the zero-frequency limits. The absorbed resolvent is
// analytic at 0 but the closed-form route degenerates there (1/s source
// terms), so values and slopes are taken on a small real grid and
// extrapolated. Four nodes in a fixed 8:4:2:1 ratio give a cubic fit; the
// step is small enough that even the weakest route involved (the O(h^3)
// derivative of the value fit) stays inside the 1e-6 agreement band, while
// the entry values themselves stay O(1) so no precision is lost. The floor
// keeps the smallest node at the edge of the catastrophe-layer frequency
// guard when gamma is tiny.
std::array<double, 4> limit_grid(double gamma) {
    const double h = std::max(3.125e-4 * gamma, 1e-8);
    return {8.0 * h, 4.0 * h, 2.0 * h, 1.0 * h};
}

// Value at 0 of the cubic through (xs[i], ys[i]), by Neville's scheme.
double neville_at_zero(const std::array<double, 4>& xs, std::array<double, 4> ys) {
    for (int k = 1; k < 4; ++k) {
        for (int i = 0; i + k < 4; ++i) {
            ys[i] = (xs[i] * ys[i + 1] - xs[i + k] * ys[i]) / (xs[i] - xs[i + k]);
        }
    }
    return ys[0];
}

// Derivative at 0 of the same cubic, via Newton divided differences.
double poly_slope_at_zero(const std::array<double, 4>& xs, const std::array<double, 4>& ys) {
    std::array<double, 3> d1{};
    for (int i = 0; i < 3; ++i) {
        d1[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    }
    std::array<double, 2> d2{};
    for (int i = 0; i < 2; ++i) {
        d2[i] = (d1[i + 1] - d1[i]) / (xs[i + 2] - xs[i]);
    }
    const double d3 = (d2[1] - d2[0]) / (xs[3] - xs[0]);
    return d1[0] - d2[0] * (xs[0] + xs[1]) +
           d3 * (xs[0] * xs[1] + xs[0] * xs[2] + xs[1] * xs[2]);
}

struct GridPoint {
    detail::ShiftedRows rows;
    detail::RouteScalars value;
    detail::RouteScalars slope;  // meaningful only when slopes were requested
};

struct LimitGrid {
    std::array<double, 4> s{};
    std::array<GridPoint, 4> points;
    bool with_slopes = false;
    std::size_t level = 0;
};

LimitGrid evaluate_limit_grid(const RateSchedule& schedule, const CatastropheRates& cat,
                              int start, const TruncationPolicy& policy, bool with_slopes,
                              std::size_t min_cover) {
    LimitGrid grid;
    grid.s = limit_grid(cat.total());
    grid.with_slopes = with_slopes;
    for (int k = 0; k < 4; ++k) {
        GridPoint& p = grid.points[static_cast<std::size_t>(k)];
        p.rows = detail::shifted_rows(schedule, cat, start, Frequency(grid.s[static_cast<std::size_t>(k)], 0.0),
                                      policy, with_slopes, min_cover);
        p.value = detail::route_scalars(cat, p.rows.s, p.rows);
        detail::require_usable_norm(p.value.norm);
        if (with_slopes) {
            p.slope = detail::route_scalars_slope(cat, p.rows.s, p.rows, p.value);
        }
        grid.level = std::max(grid.level, p.rows.level);
    }
    return grid;
}

struct LimitResult {
    double value = 0.0;
    double slope = 0.0;
    double slope_fd = 0.0;
};

// Extrapolates one absorbed-resolvent entry (and optionally its slope) to
// frequency 0. The slope is computed twice: the analytic derivative chain
// extrapolated over the grid, and the derivative of the value fit itself.
// Disagreement means at least one route cannot be trusted, so the operation
// refuses to return a number.
LimitResult extrapolate_entry(const LimitGrid& grid, std::size_t target) {
    std::array<double, 4> values{};
    std::array<double, 4> slopes{};
    for (std::size_t k = 0; k < 4; ++k) {
        const GridPoint& p = grid.points[k];
        values[k] = detail::shifted_route_value(p.value, p.rows, target).real();
        if (grid.with_slopes) {
            slopes[k] = detail::shifted_route_slope(p.value, p.slope, p.rows, target).real();
        }
    }
    LimitResult out;
    out.value = neville_at_zero(grid.s, values);
    if (grid.with_slopes) {
        out.slope = neville_at_zero(grid.s, slopes);
        out.slope_fd = poly_slope_at_zero(grid.s, values);
        const double gap = std::abs(out.slope - out.slope_fd);
        const double scale = std::max(1.0, std::abs(out.slope));
        if (!(gap <= 1e-6 * scale)) {
            std::ostringstream msg;
            msg << "zero-frequency slope routes disagree at target " << target
                << ": analytic chain " << out.slope << ", value-fit derivative " << out.slope_fd
                << " (gap " << gap << ", allowed " << 1e-6 * scale << ")";
            throw InversionError(msg.str());
        }
    }
    return out;
}

TypeProbabilities type_probabilities_from(const CatastropheRates& cat, double v0, double v1) {
    const double gamma = cat.total();
    const double raw_alpha = cat.alpha * (1.0 + cat.beta * (v1 - v0)) / gamma;
    const double raw_beta = cat.beta * (1.0 + cat.alpha * (v0 - v1)) / gamma;
    const double band = 1e-9;
    if (raw_alpha < -band || raw_alpha > 1.0 + band || raw_beta < -band ||
        raw_beta > 1.0 + band) {
        std::ostringstream msg;
        msg << "type probabilities fell outside [0,1]: alpha-first " << raw_alpha
            << ", beta-first " << raw_beta;
        throw NumericError(msg.str());
    }
    TypeProbabilities p;
    p.alpha_first = std::clamp(raw_alpha, 0.0, 1.0);
    p.beta_first = std::clamp(raw_beta, 0.0, 1.0);
    return p;
}

double settle_variance(double mean, double second) {
    const double variance = second - mean * mean;
    if (variance >= 0.0) {
        return variance;
    }
    if (variance >= -1e-9 * std::max(1.0, mean * mean)) {
        return 0.0;  // rounding residue of second - mean^2
    }
    std::ostringstream msg;
    msg << "second moment " << second << " is inconsistent with mean " << mean
        << " (variance " << variance << ")";
    throw NumericError(msg.str());
}

}  // namespace

TransformTriple first_catastrophe_transform(const RateSchedule& schedule,
                                            const CatastropheRates& cat, int start,
                                            Frequency s, const TruncationPolicy& policy) {
    require_catastrophes(cat);
    detail::require_catastrophe_frequency(s);
    const detail::ShiftedRows rows = detail::shifted_rows(schedule, cat, start, s, policy,
                                                          /*with_derivatives=*/false,
                                                          /*min_cover=*/1);
    const detail::RouteScalars v = detail::route_scalars(cat, s, rows);
    detail::require_usable_norm(v.norm);
    const Complex phi0 = detail::shifted_route_value(v, rows, 0);
    const Complex phi1 = detail::shifted_route_value(v, rows, 1);
    const Complex miss0 = 1.0 - s * phi0;  // transform mass not yet absorbed via level 0
    const Complex miss1 = 1.0 - s * phi1;
    const double alpha = cat.alpha;
    const double beta = cat.beta;
    const double gamma = cat.total();

    TransformTriple out;
    out.s = s;
    const Complex pole_pair = s * s + gamma * s;
    out.alpha_part = (alpha * (s + beta) * miss0 - alpha * beta * miss1) / pole_pair;
    out.beta_part = (beta * (s + alpha) * miss1 - alpha * beta * miss0) / pole_pair;
    out.total = (alpha * miss0 + beta * miss1) / (s + gamma);
    return out;
}

TypeProbabilities type_probabilities(const RateSchedule& schedule, const CatastropheRates& cat,
                                     int start, const TruncationPolicy& policy) {
    require_catastrophes(cat);
    const LimitGrid grid = evaluate_limit_grid(schedule, cat, start, policy,
                                               /*with_slopes=*/false, /*min_cover=*/1);
    const double v0 = extrapolate_entry(grid, 0).value;
    const double v1 = extrapolate_entry(grid, 1).value;
    return type_probabilities_from(cat, v0, v1);
}

FirstCatastropheReport first_catastrophe_moments(const RateSchedule& schedule,
                                                 const CatastropheRates& cat, int start,
                                                 const TruncationPolicy& policy) {
    require_catastrophes(cat);
    const LimitGrid grid = evaluate_limit_grid(schedule, cat, start, policy,
                                               /*with_slopes=*/true, /*min_cover=*/1);
    const LimitResult at0 = extrapolate_entry(grid, 0);
    const LimitResult at1 = extrapolate_entry(grid, 1);

    const double alpha = cat.alpha;
    const double beta = cat.beta;
    const double gamma = cat.total();
    const double occupancy = 1.0 + alpha * at0.value + beta * at1.value;
    const double mean = occupancy / gamma;
    const double second =
        2.0 * (occupancy - gamma * (alpha * at0.slope + beta * at1.slope)) / (gamma * gamma);

    FirstCatastropheReport report;
    report.start = start;
    report.mean = mean;
    report.second_moment = second;
    report.variance = settle_variance(mean, second);
    const TypeProbabilities p = type_probabilities_from(cat, at0.value, at1.value);
    report.p_alpha_first = p.alpha_first;
    report.p_beta_first = p.beta_first;
    report.truncation_level = grid.level;
    report.rel_tol = policy.rel_tol;
    return report;
}

FirstCatastropheReport single_type_moments(const RateSchedule& schedule, double rate,
                                           SingleType which, int start,
                                           const TruncationPolicy& policy) {
    if (!std::isfinite(rate) || rate <= 0.0) {
        std::ostringstream msg;
        msg << "single-type catastrophe rate must be positive and finite, got " << rate;
        throw DomainError(msg.str());
    }
    if (start < 0) {
        throw DomainError("start level must be nonnegative");
    }
    const int reset = which == SingleType::AlphaOnly ? 0 : 1;
    const Frequency s(rate, 0.0);

    ResolventRowPair from_start = base_resolvent_row_with_derivative(schedule, start, s, policy);
    if (!from_start.row.converged || !from_start.derivative.converged) {
        throw TruncationError("single-type moments: resolvent row from the start level "
                              "did not settle within the truncation policy");
    }
    ResolventRowPair from_reset =
        start == reset ? from_start
                       : base_resolvent_row_with_derivative(schedule, reset, s, policy);
    if (!from_reset.row.converged || !from_reset.derivative.converged) {
        throw TruncationError("single-type moments: resolvent row from the reset level "
                              "did not settle within the truncation policy");
    }

    const double r_start = from_start.row.at(reset).real();
    const double dr_start = from_start.derivative.at(reset).real();
    const double r_reset = from_reset.row.at(reset).real();
    const double dr_reset = from_reset.derivative.at(reset).real();

    const double den = 1.0 - rate * r_reset;
    if (std::abs(den) < 1e-300) {
        throw SingularDenominatorError("single-type moments: renewal denominator underflowed");
    }
    const double mean = 1.0 / rate + r_start / den;
    const double second = 2.0 / (rate * rate) *
                          (1.0 + rate * r_start / den - rate * rate * dr_start / den -
                           rate * rate * rate * r_start * dr_reset / (den * den));

    FirstCatastropheReport report;
    report.start = start;
    report.mean = mean;
    report.second_moment = second;
    report.variance = settle_variance(mean, second);
    report.p_alpha_first = which == SingleType::AlphaOnly ? 1.0 : 0.0;
    report.p_beta_first = which == SingleType::BetaOnly ? 1.0 : 0.0;
    report.truncation_level =
        std::max(from_start.row.truncation_level, from_reset.row.truncation_level);
    report.rel_tol = policy.rel_tol;
    return report;
}

double first_catastrophe_density_raw(const RateSchedule& schedule, const CatastropheRates& cat,
                                     int start, double t, const TruncationPolicy& policy,
                                     const InversionSettings& inversion) {
    require_catastrophes(cat);
    require_positive_time(t);
    return invert_laplace(
        [&](Complex z) {
            return first_catastrophe_transform(schedule, cat, start, z, policy).total;
        },
        t, inversion);
}

double first_catastrophe_density(const RateSchedule& schedule, const CatastropheRates& cat,
                                 int start, double t, const TruncationPolicy& policy,
                                 const InversionSettings& inversion) {
    const double raw = first_catastrophe_density_raw(schedule, cat, start, t, policy, inversion);
    if (raw < 0.0 && raw >= -1e-6) {
        return 0.0;  // inversion noise around a vanishing density
    }
    return raw;
}

double first_catastrophe_cdf(const RateSchedule& schedule, const CatastropheRates& cat,
                             int start, double t, const TruncationPolicy& policy,
                             const InversionSettings& inversion) {
    require_catastrophes(cat);
    require_positive_time(t);
    return invert_laplace(
        [&](Complex z) {
            return first_catastrophe_transform(schedule, cat, start, z, policy).total / z;
        },
        t, inversion);
}

ValueSlope absorbed_value_slope_at_zero(const RateSchedule& schedule, const CatastropheRates& cat,
                                        int start, int target,
                                        const TruncationPolicy& policy) {
    require_catastrophes(cat);
    if (target < 0) {
        throw DomainError("zero-frequency value/slope is defined for chain targets >= 0");
    }
    const std::size_t cover = std::max<std::size_t>(static_cast<std::size_t>(target), 1);
    const LimitGrid grid =
        evaluate_limit_grid(schedule, cat, start, policy, /*with_slopes=*/true, cover);
    const LimitResult r = extrapolate_entry(grid, static_cast<std::size_t>(target));
    ValueSlope out;
    out.value = r.value;
    out.slope = r.slope;
    out.slope_check = r.slope_fd;
    return out;
}

Complex absorbed_resolvent_slope(const RateSchedule& schedule, const CatastropheRates& cat,
                                 int start, int target, Frequency s,
                                 const TruncationPolicy& policy) {
    if (target < 0) {
        throw DomainError("frequency derivative is provided for chain targets >= 0");
    }
    detail::require_catastrophe_frequency(s);
    const std::size_t cover = std::max<std::size_t>(static_cast<std::size_t>(target), 1);
    const detail::ShiftedRows rows = detail::shifted_rows(schedule, cat, start, s, policy,
                                                          /*with_derivatives=*/true, cover);
    const detail::RouteScalars v = detail::route_scalars(cat, s, rows);
    detail::require_usable_norm(v.norm);
    const detail::RouteScalars d = detail::route_scalars_slope(cat, s, rows, v);
    return detail::shifted_route_slope(v, d, rows, static_cast<std::size_t>(target));
}

}  // namespace bdcat
