#include "bdcat/crosscheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <sstream>

#include "bdcat/catastrophe.hpp"
#include "bdcat/errors.hpp"
#include "bdcat/first_catastrophe.hpp"
#include "bdcat/simulate.hpp"
#include "bdcat/transient.hpp"

namespace bdcat {

namespace {

double rel_gap(Complex a, Complex b) {
    return std::abs(a - b) / (std::abs(b) + 1e-30);
}

// The worst |a - b| / se over a pair, treating se = 0 as "must match".
double z_score(double observed, double expected, double se) {
    const double gap = std::abs(observed - expected);
    if (se > 0.0) {
        return gap / se;
    }
    return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

void run_check(CrosscheckReport& report, const std::string& name, double threshold,
               const std::function<double()>& body) {
    CheckResult result;
    result.name = name;
    result.threshold = threshold;
    try {
        result.measured = body();
        result.status = result.measured <= threshold ? CheckResult::Status::Pass
                                                     : CheckResult::Status::Fail;
    } catch (const std::exception& error) {
        result.status = CheckResult::Status::Fail;
        result.measured = std::numeric_limits<double>::quiet_NaN();
        result.note = error.what();
    }
    report.checks.push_back(std::move(result));
}

void skip_check(CrosscheckReport& report, const std::string& name, const std::string& reason) {
    CheckResult result;
    result.name = name;
    result.status = CheckResult::Status::Skipped;
    result.note = reason;
    report.checks.push_back(std::move(result));
}

}  // namespace

bool CrosscheckReport::all_passed() const {
    for (const CheckResult& check : checks) {
        if (check.status == CheckResult::Status::Fail) {
            return false;
        }
    }
    return true;
}

CrosscheckReport run_crosscheck(const Model& model, const NumericsConfig& numerics,
                                std::uint64_t seed, std::size_t replications) {
    const ValidationReport validation = validate_model(model);
    if (!validation.ok()) {
        std::ostringstream msg;
        msg << "model failed validation:";
        for (const std::string& violation : validation.violations) {
            msg << " " << violation << ";";
        }
        throw DomainError(msg.str());
    }
    if (replications < 1000) {
        std::ostringstream msg;
        msg << "at least 1000 replications required, got " << replications;
        throw DomainError(msg.str());
    }

    const RateSchedule& schedule = model.rates;
    const CatastropheRates& cat = model.catastrophe;
    const TruncationPolicy& policy = numerics.truncation;
    const std::vector<int> starts = {0, 1, 5};
    const std::vector<Frequency> probes = {Frequency(0.5, 0.0), Frequency(1.0, 0.0),
                                           Frequency(3.0, 0.0), Frequency(1.0, 1.0)};

    CrosscheckReport report;

    run_check(report, "full_resolvent_identity_vs_direct", 1e-9, [&] {
        double worst = 0.0;
        for (int j : starts) {
            for (const Frequency& s : probes) {
                const ResolventVector via_identity = full_resolvent_row(schedule, cat, j, s, policy);
                const ResolventVector direct = full_resolvent_direct(schedule, cat, j, s, policy);
                for (long long n = 0; n <= 10; ++n) {
                    worst = std::max(worst, rel_gap(via_identity.at(n), direct.at(n)));
                }
            }
        }
        return worst;
    });

    run_check(report, "transition_formula_vs_uniformization", 1e-6, [&] {
        double worst = 0.0;
        for (int j : {0, 1}) {
            for (double t : {0.5, 2.0}) {
                const TransientRow formula =
                    transition_row_formula(schedule, cat, j, t, policy, numerics.quadrature);
                const TransientRow direct = transition_row_direct(schedule, cat, j, t, policy);
                const long long top = static_cast<long long>(
                    std::max(formula.probabilities.size(), direct.probabilities.size()));
                for (long long n = 0; n < top; ++n) {
                    worst = std::max(worst, std::abs(formula.at(n) - direct.at(n)));
                }
            }
        }
        return worst;
    });

    run_check(report, "transition_rows_conserve_mass", 1e-6, [&] {
        double worst = 0.0;
        for (int j : {0, 1}) {
            for (double t : {0.5, 2.0}) {
                const TransientRow formula =
                    transition_row_formula(schedule, cat, j, t, policy, numerics.quadrature);
                const TransientRow direct = transition_row_direct(schedule, cat, j, t, policy);
                worst = std::max(worst, std::abs(formula.sum() - 1.0));
                worst = std::max(worst, std::abs(direct.sum() - 1.0));
            }
        }
        return worst;
    });

    if (!model.has_catastrophes()) {
        const std::string reason = "model has alpha = beta = 0";
        skip_check(report, "absorbed_route_agreement", reason);
        skip_check(report, "absorbed_resolvent_mass", reason);
        skip_check(report, "norm_dual_forms", reason);
        skip_check(report, "transform_parts_sum_to_total", reason);
        skip_check(report, "transform_mass_at_small_frequency", reason);
        skip_check(report, "type_probability_sum", reason);
        skip_check(report, "moments_vs_simulation", reason);
        skip_check(report, "cdf_vs_simulation", reason);
        skip_check(report, "density_normalizes", reason);
        skip_check(report, "simulator_determinism", reason);
        return report;
    }

    run_check(report, "absorbed_route_agreement", 1e-9, [&] {
        double worst = 0.0;
        for (int j : starts) {
            for (const Frequency& s : probes) {
                const AbsorbedResolventVector routed =
                    absorbed_resolvent_row(schedule, cat, j, s, policy);
                const AbsorbedResolventVector direct =
                    absorbed_resolvent_direct(schedule, cat, j, s, policy);
                for (std::size_t n = 0; n <= 10; ++n) {
                    const Complex through_coeffs =
                        absorbed_resolvent_via_coeffs(schedule, cat, j, static_cast<int>(n), s,
                                                      policy);
                    worst = std::max(worst, rel_gap(routed.entries[n], direct.entries[n]));
                    worst = std::max(worst, rel_gap(through_coeffs, direct.entries[n]));
                }
                worst = std::max(worst, rel_gap(routed.alpha_absorbed, direct.alpha_absorbed));
                worst = std::max(worst, rel_gap(routed.beta_absorbed, direct.beta_absorbed));
            }
        }
        return worst;
    });

    run_check(report, "absorbed_resolvent_mass", 1e-8, [&] {
        double worst = 0.0;
        for (int j : starts) {
            for (const Frequency& s : probes) {
                const AbsorbedResolventVector row =
                    absorbed_resolvent_row(schedule, cat, j, s, policy);
                worst = std::max(worst, std::abs(s * row.sum() - 1.0));
            }
        }
        return worst;
    });

    run_check(report, "norm_dual_forms", 1e-10, [&] {
        double worst = 0.0;
        for (const Frequency& s : probes) {
            const CatastropheFactors factors = catastrophe_factors(schedule, cat, 0, s, policy);
            const Complex dual = norm_from_full_resolvent(schedule, cat, s, policy);
            worst = std::max(worst, rel_gap(factors.norm, dual));
        }
        return worst;
    });

    run_check(report, "transform_parts_sum_to_total", 1e-12, [&] {
        double worst = 0.0;
        for (int j : starts) {
            for (const Frequency& s : probes) {
                const TransformTriple triple =
                    first_catastrophe_transform(schedule, cat, j, s, policy);
                worst = std::max(worst,
                                 std::abs(triple.alpha_part + triple.beta_part - triple.total));
            }
        }
        return worst;
    });

    run_check(report, "transform_mass_at_small_frequency", 1e-4, [&] {
        double worst = 0.0;
        for (int j : starts) {
            const TransformTriple triple =
                first_catastrophe_transform(schedule, cat, j, Frequency(1e-6, 0.0), policy);
            worst = std::max(worst, std::abs(triple.total - 1.0));
        }
        return worst;
    });

    run_check(report, "type_probability_sum", 1e-9, [&] {
        double worst = 0.0;
        for (int j : starts) {
            const TypeProbabilities p = type_probabilities(schedule, cat, j, policy);
            worst = std::max(worst, std::abs(p.alpha_first + p.beta_first - 1.0));
        }
        return worst;
    });

    // One simulation run per start feeds both the moment comparison and the
    // CDF probes; each start gets its own master seed.
    const std::vector<double> probe_times = {0.5, 2.0, 5.0};
    run_check(report, "moments_vs_simulation", 3.0, [&] {
        double worst = 0.0;
        for (int j : {0, 1}) {
            const SimulationSummary sim = estimate_first_catastrophe(
                schedule, cat, j, replications, seed + static_cast<std::uint64_t>(j),
                probe_times);
            const FirstCatastropheReport analytic =
                first_catastrophe_moments(schedule, cat, j, policy);
            worst = std::max(worst, z_score(sim.mean_C, analytic.mean, sim.se_mean));
            worst = std::max(worst, z_score(sim.variance_C, analytic.variance, sim.se_variance));
            worst = std::max(worst,
                             z_score(sim.p_alpha_first, analytic.p_alpha_first, sim.se_p_alpha));
        }
        return worst;
    });

    run_check(report, "cdf_vs_simulation", 3.0, [&] {
        const SimulationSummary sim =
            estimate_first_catastrophe(schedule, cat, 0, replications, seed, probe_times);
        double worst = 0.0;
        for (const CdfPoint& point : sim.cdf) {
            const double analytic = first_catastrophe_cdf(schedule, cat, 0, point.time, policy,
                                                          numerics.inversion);
            worst = std::max(worst, z_score(point.fraction, analytic, point.se));
        }
        return worst;
    });

    run_check(report, "density_normalizes", 2e-3, [&] {
        const FirstCatastropheReport moments = first_catastrophe_moments(schedule, cat, 0, policy);
        const double horizon = moments.mean / 1e-4;  // Markov bound on the tail mass
        const auto density = [&](double t) {
            return first_catastrophe_density_raw(schedule, cat, 0, t, policy,
                                                 numerics.inversion);
        };
        // The mass sits within a few means of 0 while the Markov horizon is
        // four orders of magnitude out, so a single adaptive call would
        // accept a giant panel whose sample points all miss the bulk.
        // Integrating over geometrically growing segments keeps every
        // adaptive call at a scale where its error test is meaningful.
        const QuadratureSettings segment_settings{1e-4, numerics.quadrature.max_depth};
        double integral = 0.0;
        double left = 0.0;
        double right = std::min(horizon, 8.0 * moments.mean);
        while (true) {
            integral += integrate_adaptive_scalar(density, left, right, segment_settings);
            if (right >= horizon) {
                break;
            }
            left = right;
            right = std::min(horizon, 4.0 * right);
        }
        return std::abs(integral - 1.0);
    });

    run_check(report, "simulator_determinism", 0.0, [&] {
        const std::size_t reps = 2000;
        const SimulationSummary a =
            estimate_first_catastrophe(schedule, cat, 0, reps, seed, probe_times);
        const SimulationSummary b =
            estimate_first_catastrophe(schedule, cat, 0, reps, seed, probe_times);
        const bool identical = std::memcmp(&a.mean_C, &b.mean_C, sizeof(double)) == 0 &&
                               std::memcmp(&a.second_moment_C, &b.second_moment_C,
                                           sizeof(double)) == 0 &&
                               std::memcmp(&a.p_alpha_first, &b.p_alpha_first,
                                           sizeof(double)) == 0 &&
                               a.capped_paths == b.capped_paths;
        return identical ? 0.0 : 1.0;
    });

    return report;
}

}  // namespace bdcat
