#pragma once

#include <cstddef>

#include "bdcat/catastrophe.hpp"
#include "bdcat/inversion.hpp"
#include "bdcat/rates.hpp"
#include "bdcat/resolvent.hpp"
#include "bdcat/truncation.hpp"

namespace bdcat {

/// Laplace transforms, at one frequency, of the first-effective-catastrophe
/// time distribution started from one level: alpha_part transforms the
/// sub-density of "an effective alpha event came first", beta_part the beta
/// analogue, and total their sum (the transform of the full density).
struct TransformTriple {
    Frequency s{};
    Complex alpha_part{};
    Complex beta_part{};
    Complex total{};
};

struct TypeProbabilities {
    double alpha_first = 0.0;  // an effective alpha event comes first
    double beta_first = 0.0;
};

/// Moments of the first effective catastrophe time plus the type split,
/// with the numerical metadata needed to judge the values.
struct FirstCatastropheReport {
    int start = 0;
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;
    double p_alpha_first = 0.0;
    double p_beta_first = 0.0;
    std::size_t truncation_level = 0;  // largest window used by the limits
    double rel_tol = 0.0;              // policy tolerance the values were run at
};

/// Which single catastrophe type a reduced model keeps.
enum class SingleType { AlphaOnly, BetaOnly };

/// Transforms of the first-catastrophe time from `start` at frequency s.
/// Requires alpha + beta > 0 (DomainError otherwise) and Re(s) > 0.
TransformTriple first_catastrophe_transform(const RateSchedule& schedule,
                                            const CatastropheRates& cat, int start,
                                            Frequency s, const TruncationPolicy& policy = {});

/// P(effective alpha before effective beta) and its complement, evaluated
/// from the zero-frequency limits of the absorbed resolvent.
TypeProbabilities type_probabilities(const RateSchedule& schedule, const CatastropheRates& cat,
                                     int start, const TruncationPolicy& policy = {});

/// Mean, second moment, variance and type probabilities of the first
/// effective catastrophe time. The zero-frequency values and slopes of the
/// absorbed resolvent are obtained by extrapolating a small frequency grid
/// to 0; the slope is computed twice (analytic derivative chain and a
/// finite-difference fit) and a mismatch beyond 1e-6 relative raises
/// InversionError rather than returning a doubtful number.
FirstCatastropheReport first_catastrophe_moments(const RateSchedule& schedule,
                                                 const CatastropheRates& cat, int start,
                                                 const TruncationPolicy& policy = {});

/// Closed-form moments for a model with exactly one catastrophe type, written
/// directly in terms of the base resolvent at the real frequency `rate`
/// (no limit extrapolation involved). Cross-validates the general path.
FirstCatastropheReport single_type_moments(const RateSchedule& schedule, double rate,
                                           SingleType which, int start,
                                           const TruncationPolicy& policy = {});

/// Density of the first-catastrophe time at t > 0 by numerical transform
/// inversion. The raw inversion value can dip slightly below zero; the
/// default form clips negative values that lie inside the inversion noise
/// band (1e-6) to 0 and leaves larger violations visible.
double first_catastrophe_density(const RateSchedule& schedule, const CatastropheRates& cat,
                                 int start, double t, const TruncationPolicy& policy = {},
                                 const InversionSettings& inversion = {});

/// Unclipped inversion value (diagnostic / acceptance form).
double first_catastrophe_density_raw(const RateSchedule& schedule, const CatastropheRates& cat,
                                     int start, double t, const TruncationPolicy& policy = {},
                                     const InversionSettings& inversion = {});

/// P(first catastrophe time <= t), by inverting the transform divided by s.
double first_catastrophe_cdf(const RateSchedule& schedule, const CatastropheRates& cat,
                             int start, double t, const TruncationPolicy& policy = {},
                             const InversionSettings& inversion = {});

/// Zero-frequency value and slope of one absorbed-resolvent entry
/// (target >= 0), via grid extrapolation. Building block of the moment
/// formulas, exposed for the derivative cross-checks. `slope` comes from
/// extrapolating the analytic derivative chain; `slope_check` from
/// differentiating the polynomial fit of the values (the two must agree,
/// and the operation fails loudly when they do not).
struct ValueSlope {
    double value = 0.0;
    double slope = 0.0;
    double slope_check = 0.0;
};
ValueSlope absorbed_value_slope_at_zero(const RateSchedule& schedule, const CatastropheRates& cat,
                                        int start, int target,
                                        const TruncationPolicy& policy = {});

/// Frequency-derivative of an absorbed-resolvent entry at Re(s) > 0, by the
/// analytic chain through the closed-form route (uses base-resolvent
/// derivatives, no finite differences).
Complex absorbed_resolvent_slope(const RateSchedule& schedule, const CatastropheRates& cat,
                                 int start, int target, Frequency s,
                                 const TruncationPolicy& policy = {});

} // namespace bdcat
