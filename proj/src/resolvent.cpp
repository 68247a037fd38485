#include "bdcat/resolvent.hpp"

#include <algorithm>
#include <cmath>

#include "bdcat/errors.hpp"
#include "killed_system.hpp"

namespace bdcat {

namespace detail {

std::vector<Complex> unit_rhs(std::size_t size, std::size_t index) {
    std::vector<Complex> rhs(size, Complex(0.0));
    rhs[index] = Complex(1.0);
    return rhs;
}

double interior_residual(const TridiagonalSystem& t, const std::vector<Complex>& x,
                         const std::vector<Complex>& rhs) {
    const std::size_t n = t.diag.size();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Complex defect = t.diag[i] * x[i] - rhs[i];
        if (i > 0) defect += t.lower[i - 1] * x[i - 1];
        defect += t.upper[i] * x[i + 1];
        worst = std::max(worst, std::abs(defect));
    }
    return worst;
}

double probe_gap(const std::vector<Complex>& coarse, const std::vector<Complex>& fine,
                 std::size_t probe_hi) {
    double worst = 0.0;
    for (std::size_t i = 0; i <= probe_hi; ++i) {
        const double gap = std::abs(fine[i] - coarse[i]) / (std::abs(fine[i]) + 1e-30);
        worst = std::max(worst, gap);
    }
    return worst;
}

} // namespace detail

void require_right_half_plane(Frequency s) {
    if (!(s.real() > 0.0)) {
        throw DomainError("frequency must have a strictly positive real part");
    }
}

Complex ResolventVector::at(long long target) const {
    if (target < 0 || static_cast<std::size_t>(target) >= entries.size()) return Complex(0.0);
    return entries[static_cast<std::size_t>(target)];
}

Complex ResolventVector::sum() const {
    Complex total(0.0);
    for (const Complex& v : entries) total += v;
    return total;
}

std::vector<Complex> base_resolvent_row_at(const RateSchedule& schedule, int start, Frequency s,
                                           std::size_t level) {
    require_right_half_plane(s);
    if (start < 0) throw DomainError("resolvent start level must be >= 0");
    if (static_cast<std::size_t>(start) > level)
        throw DomainError("truncation window does not cover the start level");
    const auto t = detail::transposed_killed_system(schedule, s, level);
    return solve_tridiagonal(t.lower, t.diag, t.upper,
                             detail::unit_rhs(level + 1, static_cast<std::size_t>(start)));
}

namespace {

std::size_t starting_level(const TruncationPolicy& policy, std::size_t probe_hi) {
    return std::min(std::max(policy.initial_level, probe_hi + 8), policy.max_level);
}

/// Shared refinement loop: solve(level) -> one or more aligned vectors;
/// converged when every vector's probe window settles.
template <typename Solve>
ResolventVector refine_rows(int start, Frequency s, const TruncationPolicy& policy,
                            std::size_t probe_hi, Solve&& solve) {
    ResolventVector out;
    out.start = start;
    out.frequency = s;

    std::size_t level = starting_level(policy, probe_hi);
    auto current = solve(level);
    while (level * policy.growth_factor <= policy.max_level) {
        const std::size_t next = level * policy.growth_factor;
        auto refined = solve(next);
        const std::size_t window = std::min(probe_hi, level);  // coarse vector covers 0..level
        double gap = 0.0;
        for (std::size_t part = 0; part < current.size(); ++part) {
            gap = std::max(gap, detail::probe_gap(current[part], refined[part], window));
        }
        current = std::move(refined);
        level = next;
        if (gap < policy.rel_tol) {
            out.converged = true;
            break;
        }
    }
    out.entries = std::move(current[0]);
    out.truncation_level = level;
    return out;
}

} // namespace

ResolventVector base_resolvent_row(const RateSchedule& schedule, int start, Frequency s,
                                   const TruncationPolicy& policy) {
    require_right_half_plane(s);
    policy.validate();
    if (start < 0) throw DomainError("resolvent start level must be >= 0");
    const std::size_t probe_hi = std::max<std::size_t>(static_cast<std::size_t>(start), 16);

    auto row = refine_rows(start, s, policy, probe_hi,
                           [&](std::size_t level) -> std::vector<std::vector<Complex>> {
                               return {base_resolvent_row_at(schedule, start, s, level)};
                           });
    const auto t = detail::transposed_killed_system(schedule, s, row.truncation_level);
    row.residual = detail::interior_residual(
        t, row.entries,
        detail::unit_rhs(row.truncation_level + 1, static_cast<std::size_t>(start)));
    return row;
}

Complex base_resolvent_entry(const RateSchedule& schedule, int start, int target, Frequency s,
                             const TruncationPolicy& policy) {
    if (target < 0) throw DomainError("resolvent target level must be >= 0");
    TruncationPolicy widened = policy;
    widened.initial_level =
        std::max(widened.initial_level, static_cast<std::size_t>(target) + 8);
    const ResolventVector row = base_resolvent_row(schedule, start, s, widened);
    if (!row.converged) {
        throw TruncationError("base resolvent did not converge by max_level " +
                              std::to_string(policy.max_level));
    }
    return row.at(target);
}

ResolventRowPair base_resolvent_row_with_derivative(const RateSchedule& schedule, int start,
                                                    Frequency s, const TruncationPolicy& policy) {
    require_right_half_plane(s);
    policy.validate();
    if (start < 0) throw DomainError("resolvent start level must be >= 0");
    const std::size_t probe_hi = std::max<std::size_t>(static_cast<std::size_t>(start), 16);

    // The derivative row solves the same transposed system with the negated
    // resolvent row as right-hand side (resolvent identity), so each
    // refinement level costs two solves against one factorization-equivalent
    // band; both windows must settle.
    std::vector<Complex> derivative_entries;
    auto row = refine_rows(start, s, policy, probe_hi,
                           [&](std::size_t level) -> std::vector<std::vector<Complex>> {
                               const auto t =
                                   detail::transposed_killed_system(schedule, s, level);
                               auto x = solve_tridiagonal(
                                   t.lower, t.diag, t.upper,
                                   detail::unit_rhs(level + 1,
                                                    static_cast<std::size_t>(start)));
                               std::vector<Complex> neg(x.size());
                               for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
                               auto xp = solve_tridiagonal(t.lower, t.diag, t.upper, neg);
                               derivative_entries = xp;
                               return {std::move(x), std::move(xp)};
                           });

    ResolventRowPair pair;
    pair.derivative.start = start;
    pair.derivative.frequency = s;
    pair.derivative.entries = std::move(derivative_entries);
    pair.derivative.truncation_level = row.truncation_level;
    pair.derivative.converged = row.converged;
    {
        const auto t = detail::transposed_killed_system(schedule, s, row.truncation_level);
        row.residual = detail::interior_residual(
            t, row.entries,
            detail::unit_rhs(row.truncation_level + 1, static_cast<std::size_t>(start)));
        std::vector<Complex> neg(row.entries.size());
        for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -row.entries[i];
        pair.derivative.residual = detail::interior_residual(t, pair.derivative.entries, neg);
    }
    pair.row = std::move(row);
    return pair;
}

ResolventVector base_resolvent_derivative_row(const RateSchedule& schedule, int start, Frequency s,
                                              const TruncationPolicy& policy) {
    return base_resolvent_row_with_derivative(schedule, start, s, policy).derivative;
}

Complex base_resolvent_derivative(const RateSchedule& schedule, int start, int target, Frequency s,
                                  const TruncationPolicy& policy) {
    if (target < 0) throw DomainError("resolvent target level must be >= 0");
    TruncationPolicy widened = policy;
    widened.initial_level =
        std::max(widened.initial_level, static_cast<std::size_t>(target) + 8);
    const ResolventVector row = base_resolvent_derivative_row(schedule, start, s, widened);
    if (!row.converged) {
        throw TruncationError("base resolvent derivative did not converge by max_level " +
                              std::to_string(policy.max_level));
    }
    return row.at(target);
}

} // namespace bdcat
