#include "bdcat/transient.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdcat/errors.hpp"

namespace bdcat {

namespace {

constexpr double kPoissonTailCut = 1e-12;

void require_time(double t) {
    if (!std::isfinite(t) || t < 0.0) {
        std::ostringstream msg;
        msg << "time must be nonnegative and finite, got " << t;
        throw DomainError(msg.str());
    }
}

void require_start(int start) {
    if (start < 0) {
        throw DomainError("start level must be nonnegative");
    }
}

// Jump structure of the uniformized chain on the window 0..level. The top
// birth rate stays inside `out` but has no destination, so that mass leaks
// out of the window exactly as in the killed truncation; the leak vanishes
// as the window grows. With catastrophes, levels 0 and 1 shed only the rate
// that actually displaces them (beta and alpha respectively).
struct StepModel {
    std::vector<double> up, down, out;
    double alpha = 0.0, beta = 0.0;
    double q = 0.0;
};

StepModel build_step_model(const RateSchedule& schedule, const CatastropheRates* cat,
                           std::size_t level) {
    const std::size_t n = level + 1;
    StepModel m;
    m.up.assign(n, 0.0);
    m.down.assign(n, 0.0);
    m.out.assign(n, 0.0);
    if (cat != nullptr) {
        m.alpha = cat->alpha;
        m.beta = cat->beta;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const long long lvl = static_cast<long long>(i);
        const double birth = schedule.birth(lvl);
        const double death = lvl >= 1 ? schedule.death(lvl) : 0.0;
        if (i + 1 < n) {
            m.up[i] = birth;
        }
        m.down[i] = death;
        double shed = 0.0;
        if (cat != nullptr) {
            if (i == 0) {
                shed = m.beta;
            } else if (i == 1) {
                shed = m.alpha;
            } else {
                shed = m.alpha + m.beta;
            }
        }
        m.out[i] = birth + death + shed;
        m.q = std::max(m.q, m.out[i]);
    }
    return m;
}

void advance(const StepModel& m, const std::vector<double>& v, std::vector<double>& next) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        double w = v[i] * (1.0 - m.out[i] / m.q);
        if (i > 0) {
            w += v[i - 1] * m.up[i - 1] / m.q;
        }
        if (i + 1 < n) {
            w += v[i + 1] * m.down[i + 1] / m.q;
        }
        next[i] = w;
    }
    if (m.alpha > 0.0 || m.beta > 0.0) {
        double mass = 0.0;
        for (double x : v) {
            mass += x;
        }
        next[0] += m.alpha * (mass - v[0]) / m.q;
        if (n > 1) {
            next[1] += m.beta * (mass - v[1]) / m.q;
        }
    }
}

// Poisson(q*t) mixture of the uniformized powers, cutting the tail once its
// remaining mass drops below kPoissonTailCut; the cut is reported so callers
// can fold it into the error budget.
std::vector<double> poisson_mixture(const StepModel& m, int start, double t,
                                    double& tail_bound) {
    const std::size_t n = m.out.size();
    std::vector<double> v(n, 0.0);
    v[static_cast<std::size_t>(start)] = 1.0;
    std::vector<double> scratch(n, 0.0);
    std::vector<double> mix(n, 0.0);

    const double qt = m.q * t;
    const bool by_recurrence = qt <= 600.0;
    const double log_qt = std::log(qt);
    double weight = by_recurrence ? std::exp(-qt) : 0.0;
    double cumulative = 0.0;
    const double cutoff = 1.0 - kPoissonTailCut;
    const std::size_t step_limit =
        static_cast<std::size_t>(qt + 12.0 * std::sqrt(qt + 1.0) + 64.0);
    for (std::size_t k = 0;; ++k) {
        if (k > 0) {
            advance(m, v, scratch);
            v.swap(scratch);
            if (by_recurrence) {
                weight *= qt / static_cast<double>(k);
            }
        }
        if (!by_recurrence) {
            const double dk = static_cast<double>(k);
            weight = std::exp(-qt + dk * log_qt - std::lgamma(dk + 1.0));
        }
        for (std::size_t i = 0; i < n; ++i) {
            mix[i] += weight * v[i];
        }
        cumulative += weight;
        if (cumulative >= cutoff || k >= step_limit) {
            break;
        }
    }
    tail_bound = std::max(0.0, 1.0 - cumulative);
    return mix;
}

std::vector<double> mixture_at_level(const RateSchedule& schedule, const CatastropheRates* cat,
                                     int start, double t, std::size_t level,
                                     double& tail_bound) {
    if (t == 0.0) {
        tail_bound = 0.0;
        std::vector<double> row(level + 1, 0.0);
        row[static_cast<std::size_t>(start)] = 1.0;
        return row;
    }
    const StepModel m = build_step_model(schedule, cat, level);
    return poisson_mixture(m, start, t, tail_bound);
}

// Window refinement shared by the base chain and the full-chain oracle:
// doubles the window until the row stops moving in sup-norm.
TransientRow uniformized_row(const RateSchedule& schedule, const CatastropheRates* cat,
                             int start, double t, const TruncationPolicy& policy,
                             TransientMethod method) {
    require_start(start);
    require_time(t);
    policy.validate();

    TransientRow row;
    row.start = start;
    row.time = t;
    row.method = method;
    if (t == 0.0) {
        row.probabilities.assign(static_cast<std::size_t>(start) + 1, 0.0);
        row.probabilities.back() = 1.0;
        row.truncation_level = static_cast<std::size_t>(start);
        row.error_budget = 0.0;
        return row;
    }

    std::size_t level = std::min<std::size_t>(
        std::max<std::size_t>(policy.initial_level, static_cast<std::size_t>(start) + 8),
        policy.max_level);
    double tail = 0.0;
    std::vector<double> coarse = mixture_at_level(schedule, cat, start, t, level, tail);
    while (true) {
        if (level >= policy.max_level) {
            break;
        }
        const std::size_t next_level =
            std::min<std::size_t>(policy.max_level,
                                  level * static_cast<std::size_t>(policy.growth_factor));
        double fine_tail = 0.0;
        std::vector<double> fine =
            mixture_at_level(schedule, cat, start, t, next_level, fine_tail);
        double gap = 0.0;
        for (std::size_t i = 0; i < coarse.size(); ++i) {
            gap = std::max(gap, std::abs(fine[i] - coarse[i]));
        }
        coarse = std::move(fine);
        level = next_level;
        tail = fine_tail;
        if (gap <= policy.rel_tol) {
            row.probabilities = std::move(coarse);
            row.truncation_level = level;
            row.error_budget = tail + gap;
            return row;
        }
    }
    std::ostringstream msg;
    msg << "transition row did not settle within max truncation level " << policy.max_level
        << " at t = " << t;
    throw TruncationError(msg.str());
}

}  // namespace

double TransientRow::at(long long level) const {
    if (level < 0 || static_cast<std::size_t>(level) >= probabilities.size()) {
        return 0.0;
    }
    return probabilities[static_cast<std::size_t>(level)];
}

double TransientRow::sum() const {
    double total = 0.0;
    for (double p : probabilities) {
        total += p;
    }
    return total;
}

TransientRow base_transition_row(const RateSchedule& schedule, int start, double t,
                                 const TruncationPolicy& policy) {
    return uniformized_row(schedule, nullptr, start, t, policy,
                           TransientMethod::BaseUniformization);
}

TransientRow transition_row_formula(const RateSchedule& schedule, const CatastropheRates& cat,
                                    int start, double t, const TruncationPolicy& policy,
                                    const QuadratureSettings& quad) {
    require_start(start);
    require_time(t);
    quad.validate();
    if (cat.total() == 0.0) {
        TransientRow row = base_transition_row(schedule, start, t, policy);
        row.method = TransientMethod::CatastropheFormula;
        return row;
    }

    TransientRow row;
    row.start = start;
    row.time = t;
    row.method = TransientMethod::CatastropheFormula;
    if (t == 0.0) {
        row.probabilities.assign(static_cast<std::size_t>(start) + 1, 0.0);
        row.probabilities.back() = 1.0;
        row.truncation_level = static_cast<std::size_t>(start);
        row.error_budget = 0.0;
        return row;
    }

    // Settle the window on the three base rows the identity needs, then pin
    // all evaluations (including inside the integral) to the largest of the
    // three so the combination is a plain vector sum.
    const TransientRow from_start = base_transition_row(schedule, start, t, policy);
    const TransientRow from_zero = base_transition_row(schedule, 0, t, policy);
    const TransientRow from_one = base_transition_row(schedule, 1, t, policy);
    const std::size_t window = std::max({from_start.truncation_level, from_zero.truncation_level,
                                         from_one.truncation_level});

    const double gamma = cat.total();
    double tail_start = 0.0;
    const std::vector<double> terminal =
        mixture_at_level(schedule, nullptr, start, t, window, tail_start);

    double tail_inside = 0.0;
    const auto integrand = [&](double u) {
        double tail0 = 0.0, tail1 = 0.0;
        const std::vector<double> row0 =
            mixture_at_level(schedule, nullptr, 0, u, window, tail0);
        const std::vector<double> row1 =
            mixture_at_level(schedule, nullptr, 1, u, window, tail1);
        tail_inside = std::max({tail_inside, tail0, tail1});
        const double damp = std::exp(-gamma * u);
        std::vector<double> g(window + 1);
        for (std::size_t i = 0; i <= window; ++i) {
            g[i] = damp * (cat.alpha * row0[i] + cat.beta * row1[i]);
        }
        return g;
    };
    const std::vector<double> integral = integrate_adaptive(integrand, 0.0, t, quad);

    const double damp_t = std::exp(-gamma * t);
    row.probabilities.assign(window + 1, 0.0);
    for (std::size_t i = 0; i <= window; ++i) {
        row.probabilities[i] = damp_t * terminal[i] + integral[i];
    }
    row.truncation_level = window;
    row.error_budget = tail_start + t * tail_inside + quad.abs_tol +
                       std::max({from_start.error_budget, from_zero.error_budget,
                                 from_one.error_budget});
    return row;
}

TransientRow transition_row_direct(const RateSchedule& schedule, const CatastropheRates& cat,
                                   int start, double t, const TruncationPolicy& policy) {
    if (cat.total() == 0.0) {
        TransientRow row = uniformized_row(schedule, nullptr, start, t, policy,
                                           TransientMethod::FullUniformization);
        return row;
    }
    return uniformized_row(schedule, &cat, start, t, policy,
                           TransientMethod::FullUniformization);
}

}  // namespace bdcat
