#pragma once

#include <cstddef>
#include <vector>

#include "bdcat/inversion.hpp"
#include "bdcat/quadrature.hpp"
#include "bdcat/rates.hpp"
#include "bdcat/truncation.hpp"

namespace bdcat {

enum class TransientMethod {
    BaseUniformization,   // catastrophe-free chain, Poisson mixture of powers
    CatastropheFormula,   // base rows combined through the integral identity
    FullUniformization,   // full catastrophe generator, direct oracle
};

/// One row of a transition function at a fixed time on levels 0..N.
struct TransientRow {
    int start = 0;
    double time = 0.0;
    std::vector<double> probabilities;
    TransientMethod method = TransientMethod::BaseUniformization;
    std::size_t truncation_level = 0;
    double error_budget = 0.0;  // Poisson tail cut + boundary leak bound

    double at(long long level) const;  // 0 outside the stored window
    double sum() const;
};

/// Row `start` of the catastrophe-free transition function at time t, by
/// uniformization on the killed truncation: with q the largest diagonal
/// magnitude, the row is the Poisson(q*t) mixture of powers of I + Q/q,
/// cutting the Poisson tail at total mass 1e-12. The window grows per
/// policy until the row stops moving (sup-norm) between refinements.
TransientRow base_transition_row(const RateSchedule& schedule, int start, double t,
                                 const TruncationPolicy& policy = {});

/// Row of the catastrophe chain at time t through the integral identity:
///   p(t) = exp(-gamma*t) * base_row(t)
///          + integral over [0, t] of exp(-gamma*u) *
///              (alpha * base_row_from_0(u) + beta * base_row_from_1(u)) du
/// with the integral evaluated by adaptive Gauss-Legendre panels.
TransientRow transition_row_formula(const RateSchedule& schedule, const CatastropheRates& cat,
                                    int start, double t, const TruncationPolicy& policy = {},
                                    const QuadratureSettings& quad = {});

/// Independent oracle: uniformization applied to the full catastrophe
/// generator (tridiagonal part plus the two catastrophe columns).
TransientRow transition_row_direct(const RateSchedule& schedule, const CatastropheRates& cat,
                                   int start, double t, const TruncationPolicy& policy = {});

} // namespace bdcat
