#include "bdcat/catastrophe.hpp"

#include <algorithm>
#include <cmath>

#include "bdcat/errors.hpp"
#include "bdcat/generator.hpp"
#include "catastrophe_internal.hpp"
#include "killed_system.hpp"

namespace bdcat {

namespace detail {

void require_catastrophe_frequency(Frequency s) {
    require_right_half_plane(s);
    if (s.imag() == 0.0 && s.real() < 1e-8) {
        throw DomainError(
            "real frequencies below 1e-8 are rejected here; use the zero-frequency "
            "limit operations in first_catastrophe");
    }
}

void require_usable_norm(Complex norm) {
    if (std::abs(norm) < 1e-300) {
        throw SingularDenominatorError(
            "normalizing factor underflowed: frequency sits numerically on a singularity");
    }
}

ShiftedRows shifted_rows(const RateSchedule& schedule, const CatastropheRates& cat, int start,
                         Frequency s, const TruncationPolicy& policy, bool with_derivatives,
                         std::size_t min_cover) {
    require_catastrophe_frequency(s);
    policy.validate();
    if (start < 0) throw DomainError("start level must be >= 0");
    const Frequency u = s + Complex(cat.total());

    ShiftedRows rows;
    rows.s = s;
    rows.shifted = u;

    const std::size_t probe_hi =
        std::max({static_cast<std::size_t>(start), std::size_t{16}, min_cover});
    std::size_t level = std::min(std::max(policy.initial_level, probe_hi + 8), policy.max_level);

    auto solve_all = [&](std::size_t lvl) {
        const auto t = transposed_killed_system(schedule, u, lvl);
        ShiftedRows r;
        r.from_start = solve_tridiagonal(t.lower, t.diag, t.upper,
                                         unit_rhs(lvl + 1, static_cast<std::size_t>(start)));
        r.from0 = solve_tridiagonal(t.lower, t.diag, t.upper, unit_rhs(lvl + 1, 0));
        r.from1 = solve_tridiagonal(t.lower, t.diag, t.upper, unit_rhs(lvl + 1, 1));
        if (with_derivatives) {
            auto negate = [](const std::vector<Complex>& v) {
                std::vector<Complex> n(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) n[i] = -v[i];
                return n;
            };
            r.d_from_start = solve_tridiagonal(t.lower, t.diag, t.upper, negate(r.from_start));
            r.d_from0 = solve_tridiagonal(t.lower, t.diag, t.upper, negate(r.from0));
            r.d_from1 = solve_tridiagonal(t.lower, t.diag, t.upper, negate(r.from1));
        }
        r.level = lvl;
        return r;
    };

    auto gap_between = [&](const ShiftedRows& coarse, const ShiftedRows& fine) {
        const std::size_t window = std::min(probe_hi, coarse.level);
        double gap = std::max({probe_gap(coarse.from_start, fine.from_start, window),
                               probe_gap(coarse.from0, fine.from0, window),
                               probe_gap(coarse.from1, fine.from1, window)});
        if (with_derivatives) {
            gap = std::max({gap, probe_gap(coarse.d_from_start, fine.d_from_start, window),
                            probe_gap(coarse.d_from0, fine.d_from0, window),
                            probe_gap(coarse.d_from1, fine.d_from1, window)});
        }
        return gap;
    };

    ShiftedRows current = solve_all(level);
    bool converged = false;
    while (level * policy.growth_factor <= policy.max_level) {
        const std::size_t next = level * policy.growth_factor;
        ShiftedRows refined = solve_all(next);
        const double gap = gap_between(current, refined);
        current = std::move(refined);
        level = next;
        if (gap < policy.rel_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw TruncationError("shifted resolvent rows did not converge by max_level " +
                              std::to_string(policy.max_level));
    }
    current.s = s;
    current.shifted = u;
    current.converged = true;
    return current;
}

RouteScalars route_scalars(const CatastropheRates& cat, Frequency s, const ShiftedRows& rows) {
    const double a = cat.alpha;
    const double b = cat.beta;
    const Complex sg = s + Complex(cat.total());
    RouteScalars v;
    v.defect0 = 1.0 - a * rows.from0[0] - b * rows.from1[0];
    v.defect1 = 1.0 - a * rows.from0[1] - b * rows.from1[1];
    v.alpha_factor = 1.0 - a * rows.from0[0];
    v.beta_factor = 1.0 - b * rows.from1[1];
    v.norm = a * b *
                 (v.defect0 * rows.from0[1] + v.defect1 * rows.from1[0] -
                  s * rows.from1[0] * rows.from0[1]) +
             a * v.defect0 * v.beta_factor + b * v.defect1 * v.alpha_factor +
             s * v.alpha_factor * v.beta_factor;
    v.weight0 = a * sg * v.beta_factor * rows.from_start[0] +
                a * b * sg * rows.from1[0] * rows.from_start[1];
    v.weight1 = b * sg * v.alpha_factor * rows.from_start[1] +
                a * b * sg * rows.from0[1] * rows.from_start[0];
    return v;
}

RouteScalars route_scalars_slope(const CatastropheRates& cat, Frequency s,
                                 const ShiftedRows& rows, const RouteScalars& v) {
    const double a = cat.alpha;
    const double b = cat.beta;
    const Complex sg = s + Complex(cat.total());
    RouteScalars d;
    d.defect0 = -a * rows.d_from0[0] - b * rows.d_from1[0];
    d.defect1 = -a * rows.d_from0[1] - b * rows.d_from1[1];
    d.alpha_factor = -a * rows.d_from0[0];
    d.beta_factor = -b * rows.d_from1[1];
    d.norm = a * b *
                 (d.defect0 * rows.from0[1] + v.defect0 * rows.d_from0[1] +
                  d.defect1 * rows.from1[0] + v.defect1 * rows.d_from1[0] -
                  (rows.from1[0] * rows.from0[1] +
                   s * (rows.d_from1[0] * rows.from0[1] + rows.from1[0] * rows.d_from0[1]))) +
             a * (d.defect0 * v.beta_factor + v.defect0 * d.beta_factor) +
             b * (d.defect1 * v.alpha_factor + v.defect1 * d.alpha_factor) +
             v.alpha_factor * v.beta_factor +
             s * (d.alpha_factor * v.beta_factor + v.alpha_factor * d.beta_factor);
    d.weight0 = a * (v.beta_factor * rows.from_start[0] +
                     sg * (d.beta_factor * rows.from_start[0] +
                           v.beta_factor * rows.d_from_start[0])) +
                a * b *
                    (rows.from1[0] * rows.from_start[1] +
                     sg * (rows.d_from1[0] * rows.from_start[1] +
                           rows.from1[0] * rows.d_from_start[1]));
    d.weight1 = b * (v.alpha_factor * rows.from_start[1] +
                     sg * (d.alpha_factor * rows.from_start[1] +
                           v.alpha_factor * rows.d_from_start[1])) +
                a * b *
                    (rows.from0[1] * rows.from_start[0] +
                     sg * (rows.d_from0[1] * rows.from_start[0] +
                           rows.from0[1] * rows.d_from_start[0]));
    return d;
}

Complex shifted_route_value(const RouteScalars& v, const ShiftedRows& rows, std::size_t n) {
    return rows.from_start[n] +
           (v.weight0 * rows.from0[n] + v.weight1 * rows.from1[n]) / v.norm;
}

Complex shifted_route_slope(const RouteScalars& v, const RouteScalars& d, const ShiftedRows& rows,
                            std::size_t n) {
    const Complex numer = v.weight0 * rows.from0[n] + v.weight1 * rows.from1[n];
    const Complex dnumer = d.weight0 * rows.from0[n] + v.weight0 * rows.d_from0[n] +
                           d.weight1 * rows.from1[n] + v.weight1 * rows.d_from1[n];
    return rows.d_from_start[n] + (dnumer * v.norm - numer * d.norm) / (v.norm * v.norm);
}

AbsorbedPair absorbing_entries(const CatastropheRates& cat, Frequency s, Complex phi0,
                               Complex phi1) {
    // The two absorbing entries solve
    //   (s+alpha)*x + alpha*y = alpha*(1/s - phi0)
    //   beta*x + (s+beta)*y   = beta*(1/s - phi1)
    // whose determinant is s*(s+gamma).
    const double a = cat.alpha;
    const double b = cat.beta;
    const Complex ra = a * (1.0 / s - phi0);
    const Complex rb = b * (1.0 / s - phi1);
    const Complex det = s * (s + Complex(cat.total()));
    AbsorbedPair p;
    p.alpha_absorbed = ((s + b) * ra - a * rb) / det;
    p.beta_absorbed = ((s + a) * rb - b * ra) / det;
    return p;
}

} // namespace detail

Complex AbsorbedResolventVector::sum() const {
    Complex total = alpha_absorbed + beta_absorbed;
    for (const Complex& v : entries) total += v;
    return total;
}

ResolventVector full_resolvent_row(const RateSchedule& schedule, const CatastropheRates& cat,
                                   int start, Frequency s, const TruncationPolicy& policy) {
    const auto rows = detail::shifted_rows(schedule, cat, start, s, policy, false, 0);
    ResolventVector out;
    out.start = start;
    out.frequency = s;
    out.truncation_level = rows.level;
    out.converged = rows.converged;
    out.entries.resize(rows.level + 1);
    const Complex inv_s = 1.0 / s;
    for (std::size_t n = 0; n <= rows.level; ++n) {
        out.entries[n] = rows.from_start[n] +
                         inv_s * (cat.alpha * rows.from0[n] + cat.beta * rows.from1[n]);
    }
    // Residual against the direct system the combined row is supposed to
    // solve (constant sources moved to the right-hand side).
    const auto t = detail::transposed_killed_system(schedule, s + Complex(cat.total()), rows.level);
    auto rhs = detail::unit_rhs(rows.level + 1, static_cast<std::size_t>(start));
    rhs[0] += cat.alpha * inv_s;
    rhs[1] += cat.beta * inv_s;
    out.residual = detail::interior_residual(t, out.entries, rhs);
    return out;
}

Complex full_resolvent_entry(const RateSchedule& schedule, const CatastropheRates& cat, int start,
                             int target, Frequency s, const TruncationPolicy& policy) {
    if (target < 0) throw DomainError("resolvent target level must be >= 0");
    const auto rows = detail::shifted_rows(schedule, cat, start, s, policy, false,
                                           static_cast<std::size_t>(target));
    const auto n = static_cast<std::size_t>(target);
    return rows.from_start[n] +
           (cat.alpha * rows.from0[n] + cat.beta * rows.from1[n]) / s;
}

ResolventVector full_resolvent_direct(const RateSchedule& schedule, const CatastropheRates& cat,
                                      int start, Frequency s, const TruncationPolicy& policy) {
    detail::require_catastrophe_frequency(s);
    policy.validate();
    if (start < 0) throw DomainError("start level must be >= 0");
    const Complex shift = s + Complex(cat.total());
    const std::size_t probe_hi = std::max<std::size_t>(static_cast<std::size_t>(start), 16);

    auto solve_at = [&](std::size_t level) {
        const auto t = detail::transposed_killed_system(schedule, shift, level);
        auto rhs = detail::unit_rhs(level + 1, static_cast<std::size_t>(start));
        rhs[0] += cat.alpha / s;
        rhs[1] += cat.beta / s;
        return solve_tridiagonal(t.lower, t.diag, t.upper, rhs);
    };

    ResolventVector out;
    out.start = start;
    out.frequency = s;
    std::size_t level = std::min(std::max(policy.initial_level, probe_hi + 8), policy.max_level);
    auto current = solve_at(level);
    while (level * policy.growth_factor <= policy.max_level) {
        const std::size_t next = level * policy.growth_factor;
        auto refined = solve_at(next);
        const double gap =
            detail::probe_gap(current, refined, std::min(probe_hi, level));
        current = std::move(refined);
        level = next;
        if (gap < policy.rel_tol) {
            out.converged = true;
            break;
        }
    }
    out.entries = std::move(current);
    out.truncation_level = level;
    {
        const auto t = detail::transposed_killed_system(schedule, shift, level);
        auto rhs = detail::unit_rhs(level + 1, static_cast<std::size_t>(start));
        rhs[0] += cat.alpha / s;
        rhs[1] += cat.beta / s;
        out.residual = detail::interior_residual(t, out.entries, rhs);
    }
    return out;
}

CatastropheFactors catastrophe_factors(const RateSchedule& schedule, const CatastropheRates& cat,
                                       int start, Frequency s, const TruncationPolicy& policy) {
    const auto rows = detail::shifted_rows(schedule, cat, start, s, policy, false, 1);
    const auto v = detail::route_scalars(cat, s, rows);
    detail::require_usable_norm(v.norm);

    CatastropheFactors f;
    f.start = start;
    f.s = s;
    f.truncation_level = rows.level;
    f.base_j0 = rows.from_start[0];
    f.base_j1 = rows.from_start[1];
    f.base_00 = rows.from0[0];
    f.base_01 = rows.from0[1];
    f.base_10 = rows.from1[0];
    f.base_11 = rows.from1[1];
    f.defect0 = v.defect0;
    f.defect1 = v.defect1;
    f.absence0 = v.defect0 - s * rows.from_start[0];
    f.absence1 = v.defect1 - s * rows.from_start[1];
    f.alpha_factor = v.alpha_factor;
    f.beta_factor = v.beta_factor;
    f.norm = v.norm;
    f.weight0 = v.weight0;
    f.weight1 = v.weight1;

    const Complex b00 = v.defect0 - s * rows.from0[0];
    const Complex b01 = v.defect1 - s * rows.from0[1];
    const Complex b10 = v.defect0 - s * rows.from1[0];
    const Complex b11 = v.defect1 - s * rows.from1[1];
    const Complex denom = s * v.norm;
    f.coeff0 = (cat.alpha * cat.beta * b10 * f.absence1 -
                cat.alpha * (s + cat.beta * b11) * f.absence0) /
               denom;
    f.coeff1 = (cat.alpha * cat.beta * b01 * f.absence0 -
                cat.beta * (s + cat.alpha * b00) * f.absence1) /
               denom;
    return f;
}

Complex norm_from_full_resolvent(const RateSchedule& schedule, const CatastropheRates& cat,
                                 Frequency s, const TruncationPolicy& policy) {
    const ResolventVector row0 = full_resolvent_direct(schedule, cat, 0, s, policy);
    const ResolventVector row1 = full_resolvent_direct(schedule, cat, 1, s, policy);
    if (!row0.converged || !row1.converged) {
        throw TruncationError("full resolvent rows did not converge while assembling the norm");
    }
    const Complex b00 = 1.0 - s * row0.entries[0];
    const Complex b01 = 1.0 - s * row0.entries[1];
    const Complex b10 = 1.0 - s * row1.entries[0];
    const Complex b11 = 1.0 - s * row1.entries[1];
    return ((s + cat.alpha * b00) * (s + cat.beta * b11) -
            cat.alpha * cat.beta * b10 * b01) /
           s;
}

AbsorbedResolventVector absorbed_resolvent_row(const RateSchedule& schedule,
                                               const CatastropheRates& cat, int start, Frequency s,
                                               const TruncationPolicy& policy) {
    const auto rows = detail::shifted_rows(schedule, cat, start, s, policy, false, 1);
    const auto v = detail::route_scalars(cat, s, rows);
    detail::require_usable_norm(v.norm);

    AbsorbedResolventVector out;
    out.start = start;
    out.frequency = s;
    out.truncation_level = rows.level;
    out.converged = rows.converged;
    out.entries.resize(rows.level + 1);
    for (std::size_t n = 0; n <= rows.level; ++n) {
        out.entries[n] = detail::shifted_route_value(v, rows, n);
    }
    const auto pair = detail::absorbing_entries(cat, s, out.entries[0], out.entries[1]);
    out.alpha_absorbed = pair.alpha_absorbed;
    out.beta_absorbed = pair.beta_absorbed;
    return out;
}

Complex absorbed_resolvent_entry(const RateSchedule& schedule, const CatastropheRates& cat,
                                 int start, int target, Frequency s,
                                 const TruncationPolicy& policy) {
    if (target < 0 && target != kAlphaAbsorbed && target != kBetaAbsorbed) {
        throw DomainError("absorbed resolvent target must be a level or an absorbing state");
    }
    const std::size_t cover = target >= 0 ? static_cast<std::size_t>(target) : 1;
    const auto rows = detail::shifted_rows(schedule, cat, start, s, policy, false, cover);
    const auto v = detail::route_scalars(cat, s, rows);
    detail::require_usable_norm(v.norm);
    if (target >= 0) {
        return detail::shifted_route_value(v, rows, static_cast<std::size_t>(target));
    }
    const Complex phi0 = detail::shifted_route_value(v, rows, 0);
    const Complex phi1 = detail::shifted_route_value(v, rows, 1);
    const auto pair = detail::absorbing_entries(cat, s, phi0, phi1);
    return target == kAlphaAbsorbed ? pair.alpha_absorbed : pair.beta_absorbed;
}

Complex absorbed_resolvent_via_coeffs(const RateSchedule& schedule, const CatastropheRates& cat,
                                      int start, int target, Frequency s,
                                      const TruncationPolicy& policy) {
    if (target < 0 && target != kAlphaAbsorbed && target != kBetaAbsorbed) {
        throw DomainError("absorbed resolvent target must be a level or an absorbing state");
    }
    const std::size_t cover = target >= 0 ? static_cast<std::size_t>(target) : 1;
    const auto rows = detail::shifted_rows(schedule, cat, start, s, policy, false, cover);
    const auto v = detail::route_scalars(cat, s, rows);
    detail::require_usable_norm(v.norm);

    // Full-resolvent values (shift identity applied to the matched rows).
    auto pi_start = [&](std::size_t n) {
        return rows.from_start[n] + (cat.alpha * rows.from0[n] + cat.beta * rows.from1[n]) / s;
    };
    auto pi0 = [&](std::size_t n) {
        return rows.from0[n] + (cat.alpha * rows.from0[n] + cat.beta * rows.from1[n]) / s;
    };
    auto pi1 = [&](std::size_t n) {
        return rows.from1[n] + (cat.alpha * rows.from0[n] + cat.beta * rows.from1[n]) / s;
    };

    auto value_at = [&](std::size_t n) -> Complex {
        const Complex b00 = v.defect0 - s * rows.from0[0];
        const Complex b01 = v.defect1 - s * rows.from0[1];
        const Complex b10 = v.defect0 - s * rows.from1[0];
        const Complex b11 = v.defect1 - s * rows.from1[1];
        if (start == 0) {
            return ((s + cat.beta * b11) * pi0(n) - cat.beta * b01 * pi1(n)) / v.norm;
        }
        if (start == 1) {
            return (-cat.alpha * b10 * pi0(n) + (s + cat.alpha * b00) * pi1(n)) / v.norm;
        }
        const Complex absence0 = v.defect0 - s * rows.from_start[0];
        const Complex absence1 = v.defect1 - s * rows.from_start[1];
        const Complex coeff0 = (cat.alpha * cat.beta * b10 * absence1 -
                                cat.alpha * (s + cat.beta * b11) * absence0) /
                               (s * v.norm);
        const Complex coeff1 = (cat.alpha * cat.beta * b01 * absence0 -
                                cat.beta * (s + cat.alpha * b00) * absence1) /
                               (s * v.norm);
        return pi_start(n) + coeff0 * pi0(n) + coeff1 * pi1(n);
    };

    if (target >= 0) return value_at(static_cast<std::size_t>(target));
    const auto pair = detail::absorbing_entries(cat, s, value_at(0), value_at(1));
    return target == kAlphaAbsorbed ? pair.alpha_absorbed : pair.beta_absorbed;
}

AbsorbedResolventVector absorbed_resolvent_direct(const RateSchedule& schedule,
                                                  const CatastropheRates& cat, int start,
                                                  Frequency s, const TruncationPolicy& policy) {
    detail::require_catastrophe_frequency(s);
    policy.validate();
    if (start < 0) throw DomainError("start level must be >= 0");
    const double gamma = cat.total();
    const std::size_t probe_hi = std::max<std::size_t>(static_cast<std::size_t>(start), 16);

    // Level block of the absorbed generator: the diagonal sheds only the
    // EFFECTIVE catastrophe rate (beta at level 0, alpha at level 1, gamma
    // from level 2 up), and nothing flows back from the absorbing states.
    auto diag_add = [&](long long n) {
        if (n == 0) return cat.beta;
        if (n == 1) return cat.alpha;
        return gamma;
    };
    auto solve_at = [&](std::size_t level) {
        const auto t = detail::transposed_killed_system(schedule, s, level, diag_add);
        return solve_tridiagonal(t.lower, t.diag, t.upper,
                                 detail::unit_rhs(level + 1, static_cast<std::size_t>(start)));
    };

    AbsorbedResolventVector out;
    out.start = start;
    out.frequency = s;
    std::size_t level = std::min(std::max(policy.initial_level, probe_hi + 8), policy.max_level);
    auto current = solve_at(level);
    while (level * policy.growth_factor <= policy.max_level) {
        const std::size_t next = level * policy.growth_factor;
        auto refined = solve_at(next);
        const double gap = detail::probe_gap(current, refined, std::min(probe_hi, level));
        current = std::move(refined);
        level = next;
        if (gap < policy.rel_tol) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged) {
        throw TruncationError("absorbed resolvent system did not converge by max_level " +
                              std::to_string(policy.max_level));
    }
    out.entries = std::move(current);
    out.truncation_level = level;
    const auto pair = detail::absorbing_entries(cat, s, out.entries[0], out.entries[1]);
    out.alpha_absorbed = pair.alpha_absorbed;
    out.beta_absorbed = pair.beta_absorbed;
    return out;
}

} // namespace bdcat
