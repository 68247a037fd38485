#pragma once

// Internal machinery of the absorbed-resolvent closed forms, shared between
// the catastrophe layer and the first-catastrophe statistics. Everything
// here works on base-resolvent rows taken at the shifted frequency
// u = s + alpha + beta. Not part of the public API.

#include <cstddef>
#include <vector>

#include "bdcat/rates.hpp"
#include "bdcat/resolvent.hpp"
#include "bdcat/truncation.hpp"

namespace bdcat::detail {

/// Base-resolvent rows from the start level and from levels 0 and 1, all at
/// the shifted frequency and at one matched truncation; optionally their
/// frequency-derivative rows.
struct ShiftedRows {
    Frequency s{};       // the unshifted frequency the caller asked about
    Frequency shifted{}; // s + gamma: where the rows actually live
    std::vector<Complex> from_start, from0, from1;
    std::vector<Complex> d_from_start, d_from0, d_from1;  // empty unless requested
    std::size_t level = 0;
    bool converged = false;
};

/// Solves the three rows (six with derivatives) inside one refinement loop;
/// min_cover widens the probe window so callers can read entries up to that
/// target. Throws TruncationError on non-convergence.
ShiftedRows shifted_rows(const RateSchedule& schedule, const CatastropheRates& cat, int start,
                         Frequency s, const TruncationPolicy& policy, bool with_derivatives,
                         std::size_t min_cover);

/// The scalar layer of the closed forms (values at one frequency). Field
/// meanings match CatastropheFactors in the public header.
struct RouteScalars {
    Complex defect0{}, defect1{};
    Complex alpha_factor{}, beta_factor{};
    Complex norm{};
    Complex weight0{}, weight1{};
};

RouteScalars route_scalars(const CatastropheRates& cat, Frequency s, const ShiftedRows& rows);

/// d/ds of every RouteScalars field (rows must carry derivative rows).
RouteScalars route_scalars_slope(const CatastropheRates& cat, Frequency s,
                                 const ShiftedRows& rows, const RouteScalars& value);

/// Absorbed-resolvent entry at target n >= 0 through the shifted route.
Complex shifted_route_value(const RouteScalars& v, const ShiftedRows& rows, std::size_t n);

/// d/ds of the same entry.
Complex shifted_route_slope(const RouteScalars& v, const RouteScalars& d, const ShiftedRows& rows,
                            std::size_t n);

/// The two absorbing-state entries, given the level-0 and level-1 entries of
/// the absorbed resolvent (closed-form 2x2 solve).
struct AbsorbedPair {
    Complex alpha_absorbed{}, beta_absorbed{};
};
AbsorbedPair absorbing_entries(const CatastropheRates& cat, Frequency s, Complex phi0,
                               Complex phi1);

/// Guard shared by the catastrophe-layer operations: right half-plane, and
/// real frequencies below 1e-8 rejected (the 1/s source terms degenerate;
/// zero-frequency quantities go through the limit operations instead).
void require_catastrophe_frequency(Frequency s);

/// |norm| underflow guard; throws SingularDenominatorError.
void require_usable_norm(Complex norm);

} // namespace bdcat::detail
