#pragma once

#include <cstddef>
#include <vector>

#include "bdcat/rates.hpp"
#include "bdcat/resolvent.hpp"
#include "bdcat/truncation.hpp"

namespace bdcat {

/// Scalar ingredients of the absorbed-chain resolvent formulas at one
/// frequency s and one start level. Every base-resolvent value is taken at
/// the shifted frequency s + gamma (gamma = alpha + beta); writing r[a][b]
/// for that shifted base-resolvent entry (start a, target b):
///
///   defect_n     = 1 - alpha*r[0][n] - beta*r[1][n]     (n = 0, 1)
///   absence_n    = defect_n - s*r[start][n]
///                = 1 - s * (full resolvent entry at (start, n))
///   alpha_factor = 1 - alpha*r[0][0]
///   beta_factor  = 1 - beta*r[1][1]
///   norm         = alpha*beta*(defect0*r[0][1] + defect1*r[1][0]
///                              - s*r[1][0]*r[0][1])
///                  + alpha*defect0*beta_factor + beta*defect1*alpha_factor
///                  + s*alpha_factor*beta_factor
///   weight0      = alpha*(s+gamma)*beta_factor*r[start][0]
///                  + alpha*beta*(s+gamma)*r[1][0]*r[start][1]
///   weight1      = beta*(s+gamma)*alpha_factor*r[start][1]
///                  + alpha*beta*(s+gamma)*r[0][1]*r[start][0]
///
/// Writing B[a][n] = defect_n - s*r[a][n] for the absence quantity of any
/// start level a (so absence_n = B[start][n]):
///
///   coeff0 = (alpha*beta*B[1][0]*B[start][1]
///             - alpha*(s + beta*B[1][1])*B[start][0]) / (s*norm)
///   coeff1 = (alpha*beta*B[0][1]*B[start][0]
///             - beta*(s + alpha*B[0][0])*B[start][1]) / (s*norm)
///
/// `norm` is the common normalizing factor of both closed-form routes; if it
/// underflows, the frequency sits numerically on a singularity and
/// SingularDenominatorError is thrown.
struct CatastropheFactors {
    int start = 0;
    Frequency s{};
    std::size_t truncation_level = 0;

    // Shifted base-resolvent entries actually used by the formulas.
    Complex base_j0{}, base_j1{};  // start level -> targets 0, 1
    Complex base_00{}, base_01{};  // level 0 -> targets 0, 1
    Complex base_10{}, base_11{};  // level 1 -> targets 0, 1

    Complex defect0{}, defect1{};
    Complex absence0{}, absence1{};  // of the start level
    Complex alpha_factor{}, beta_factor{};
    Complex norm{};
    Complex weight0{}, weight1{};
    Complex coeff0{}, coeff1{};
};

/// Resolvent row of the chain absorbed at the first effective catastrophe:
/// entries for targets 0..truncation_level plus the two absorbing states.
struct AbsorbedResolventVector {
    int start = 0;
    Frequency frequency{};
    Complex alpha_absorbed{};  // entry at the "alpha came first" state
    Complex beta_absorbed{};   // entry at the "beta came first" state
    std::vector<Complex> entries;
    std::size_t truncation_level = 0;
    bool converged = false;

    Complex sum() const;  // absorbing entries plus all level entries
};

/// Entry of the full-chain resolvent (catastrophes folded in) via the shift
/// identity: value = r(s+gamma; start,target)
///                   + (alpha*r(s+gamma; 0,target) + beta*r(s+gamma; 1,target))/s
/// where r is the base resolvent.
Complex full_resolvent_entry(const RateSchedule& schedule, const CatastropheRates& cat,
                             int start, int target, Frequency s,
                             const TruncationPolicy& policy = {});

/// Row form of the shift identity.
ResolventVector full_resolvent_row(const RateSchedule& schedule, const CatastropheRates& cat,
                                   int start, Frequency s, const TruncationPolicy& policy = {});

/// Independent route: solves the full-generator resolvent system directly
/// (tridiagonal in the levels, with the catastrophe inflow terms alpha/s and
/// beta/s moved to the right-hand side). Oracle for the shift identity.
ResolventVector full_resolvent_direct(const RateSchedule& schedule, const CatastropheRates& cat,
                                      int start, Frequency s, const TruncationPolicy& policy = {});

/// All closed-form scalars at (start, s). Throws SingularDenominatorError if
/// the normalizing factor underflows; DomainError for real s below 1e-8 (the
/// 1/s source terms lose all precision there; use the limit operations in
/// first_catastrophe for s -> 0 quantities).
CatastropheFactors catastrophe_factors(const RateSchedule& schedule, const CatastropheRates& cat,
                                       int start, Frequency s,
                                       const TruncationPolicy& policy = {});

/// Normalizing factor computed the second way: from absence quantities
/// 1 - s*(full resolvent entry) taken from the DIRECT full-resolvent solve,
///   norm = ((s + alpha*(1-s*pi00)) * (s + beta*(1-s*pi11))
///           - alpha*beta*(1-s*pi10)*(1-s*pi01)) / s.
/// Exists so the two algebraic forms can be cross-checked end to end.
Complex norm_from_full_resolvent(const RateSchedule& schedule, const CatastropheRates& cat,
                                 Frequency s, const TruncationPolicy& policy = {});

/// Absorbed-chain resolvent entry, default route (shifted base resolvent):
///   value = r(s+gamma; start,target)
///           + (weight0*r(s+gamma; 0,target) + weight1*r(s+gamma; 1,target)) / norm.
/// `target` may be a level (>= 0) or one of the absorbing sentinels
/// kAlphaAbsorbed / kBetaAbsorbed.
Complex absorbed_resolvent_entry(const RateSchedule& schedule, const CatastropheRates& cat,
                                 int start, int target, Frequency s,
                                 const TruncationPolicy& policy = {});

/// Same quantity through the full-resolvent route:
///   value = pi(start,target) + coeff0*pi(0,target) + coeff1*pi(1,target)
/// with dedicated two-level forms for start = 0, 1. Kept as a permanently
/// independent code path for cross-validation.
Complex absorbed_resolvent_via_coeffs(const RateSchedule& schedule, const CatastropheRates& cat,
                                      int start, int target, Frequency s,
                                      const TruncationPolicy& policy = {});

/// Row form of the default route, including the absorbing entries.
AbsorbedResolventVector absorbed_resolvent_row(const RateSchedule& schedule,
                                               const CatastropheRates& cat, int start,
                                               Frequency s, const TruncationPolicy& policy = {});

/// Linear-system oracle: solves the absorbed-generator resolvent system
/// directly. The level block is tridiagonal and closes on itself; the two
/// absorbing entries then follow from a 2x2 system in closed form.
AbsorbedResolventVector absorbed_resolvent_direct(const RateSchedule& schedule,
                                                  const CatastropheRates& cat, int start,
                                                  Frequency s, const TruncationPolicy& policy = {});

} // namespace bdcat
