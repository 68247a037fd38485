#pragma once

#include <cstddef>
#include <vector>

#include "bdcat/rates.hpp"
#include "bdcat/tridiagonal.hpp"
#include "bdcat/truncation.hpp"

namespace bdcat {

/// Resolvent frequency. Every operation taking a Frequency requires a
/// strictly positive real part and throws DomainError otherwise; values at
/// s = 0 are obtained through the limit operations in first_catastrophe.
using Frequency = Complex;

/// One row (fixed start level) of a resolvent on the truncated level window
/// 0..truncation_level.
struct ResolventVector {
    int start = 0;
    Frequency frequency{};
    std::vector<Complex> entries;      // index = target level
    std::size_t truncation_level = 0;  // entries.size() == truncation_level + 1
    bool converged = false;
    double residual = 0.0;  // sup-norm defect of the defining linear system

    Complex at(long long target) const;  // 0 outside the stored window
    Complex sum() const;
};

/// Row `start` of (s*I - Q)^{-1} for the catastrophe-free chain, computed by
/// solving the transposed tridiagonal system of the killed truncation at
/// window size N. N grows by policy.growth_factor until every probe entry
/// (targets 0..max(start,16)) moves by less than policy.rel_tol between
/// refinements; if max_level is reached first, the best vector is returned
/// with converged = false.
ResolventVector base_resolvent_row(const RateSchedule& schedule, int start,
                                   Frequency s, const TruncationPolicy& policy = {});

/// One entry of the base resolvent. The probe window is widened to cover
/// `target`. Unlike the row form, failure to converge throws TruncationError.
Complex base_resolvent_entry(const RateSchedule& schedule, int start, int target,
                             Frequency s, const TruncationPolicy& policy = {});

/// Row of d/ds (s*I - Q)^{-1}: the derivative of every entry of
/// base_resolvent_row with respect to the frequency. Uses the resolvent
/// identity (the derivative row solves the same system with the negated
/// resolvent row as right-hand side), so it costs one extra solve.
ResolventVector base_resolvent_derivative_row(const RateSchedule& schedule, int start,
                                              Frequency s, const TruncationPolicy& policy = {});

/// Entry form of the derivative; throws TruncationError on non-convergence.
Complex base_resolvent_derivative(const RateSchedule& schedule, int start, int target,
                                  Frequency s, const TruncationPolicy& policy = {});

/// Row and derivative row at one matched truncation (single refinement loop,
/// one extra solve; both probe windows must converge).
struct ResolventRowPair {
    ResolventVector row;
    ResolventVector derivative;
};
ResolventRowPair base_resolvent_row_with_derivative(const RateSchedule& schedule, int start,
                                                    Frequency s,
                                                    const TruncationPolicy& policy = {});

/// Fixed-window building block: row `start` of the killed truncation at
/// exactly `level` (no refinement loop). Exposed so oracle tests can pin N.
std::vector<Complex> base_resolvent_row_at(const RateSchedule& schedule, int start,
                                           Frequency s, std::size_t level);

/// Throws DomainError unless Re(s) > 0.
void require_right_half_plane(Frequency s);

} // namespace bdcat
