// Acceptance gate for the library: ten end-to-end criteria, each printed as
// one pass/fail line with its measured margin. The process exits nonzero if
// any criterion fails, so the ctest entry is the gate.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bdcat/catastrophe.hpp"
#include "bdcat/first_catastrophe.hpp"
#include "bdcat/quadrature.hpp"
#include "bdcat/resolvent.hpp"
#include "bdcat/simulate.hpp"
#include "bdcat/transient.hpp"

using namespace bdcat;
using Clock = std::chrono::steady_clock;

namespace {

const RateSchedule kSchedule = RateSchedule::constant(1.0, 1.25);
const CatastropheRates kCat{0.4, 0.3};

const int kStartsWide[] = {0, 1, 2, 5};
const int kStartsNarrow[] = {0, 1, 5};
const double kFrequencies[] = {0.5, 1.0, 3.0};

struct Outcome {
    bool pass = false;
    std::string detail;
};

double rel_gap(Complex a, Complex b) { return std::abs(a - b) / (std::abs(b) + 1e-30); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome resolvent_identity() {
    double worst = 0.0;
    for (int j : kStartsWide) {
        for (double s : kFrequencies) {
            const auto direct = full_resolvent_direct(kSchedule, kCat, j, s);
            for (int n = 0; n <= 10; ++n) {
                const Complex shifted = full_resolvent_entry(kSchedule, kCat, j, n, s);
                worst = std::max(worst, rel_gap(shifted, direct.at(n)));
            }
        }
    }
    return {worst < 1e-9,
            "shift identity vs direct solve, worst rel " + fmt(worst) + " (limit 1e-9)"};
}

Outcome transition_rows() {
    const auto t0 = Clock::now();
    double worst_gap = 0.0;
    double worst_mass = 0.0;
    for (int j : kStartsNarrow) {
        for (double t : {0.5, 2.0, 10.0}) {
            const auto formula = transition_row_formula(kSchedule, kCat, j, t);
            const auto direct = transition_row_direct(kSchedule, kCat, j, t);
            const long long top = static_cast<long long>(
                std::max(formula.probabilities.size(), direct.probabilities.size()));
            for (long long n = 0; n < top; ++n)
                worst_gap = std::max(worst_gap, std::abs(formula.at(n) - direct.at(n)));
            worst_mass = std::max(worst_mass, std::abs(formula.sum() - 1.0));
            worst_mass = std::max(worst_mass, std::abs(direct.sum() - 1.0));
        }
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst_gap < 1e-6 && worst_mass < 1e-6 && elapsed < 60.0;
    return {pass, "integral formula vs full uniformization, sup gap " + fmt(worst_gap) +
                      " (limit 1e-6), mass defect " + fmt(worst_mass) + ", " + fmt(elapsed) +
                      " s (limit 60)"};
}

Outcome absorbed_triple() {
    double worst = 0.0;
    double worst_mass = 0.0;
    for (int j : kStartsWide) {
        for (double s : kFrequencies) {
            const auto direct = absorbed_resolvent_direct(kSchedule, kCat, j, s);
            for (int n = 0; n <= 10; ++n) {
                const Complex target = direct.entries[static_cast<std::size_t>(n)];
                const Complex routed = absorbed_resolvent_entry(kSchedule, kCat, j, n, s);
                const Complex coeffs = absorbed_resolvent_via_coeffs(kSchedule, kCat, j, n, s);
                worst = std::max({worst, rel_gap(routed, target), rel_gap(coeffs, target),
                                  rel_gap(routed, coeffs)});
            }
            worst_mass = std::max(worst_mass, std::abs(s * direct.sum().real() - 1.0));
        }
    }
    const bool pass = worst < 1e-9 && worst_mass < 1e-8;
    return {pass, "three absorbed-resolvent routes, worst rel " + fmt(worst) +
                      " (limit 1e-9), extended-space mass defect " + fmt(worst_mass) +
                      " (limit 1e-8)"};
}

Outcome norm_and_coefficients() {
    double worst_norm = 0.0;
    double worst_link = 0.0;
    for (double s : kFrequencies) {
        const auto f0 = catastrophe_factors(kSchedule, kCat, 0, s);
        worst_norm = std::max(worst_norm,
                              rel_gap(f0.norm, norm_from_full_resolvent(kSchedule, kCat, s)));
    }
    for (int j : kStartsWide) {
        for (double s : kFrequencies) {
            const auto f = catastrophe_factors(kSchedule, kCat, j, s);
            const Complex carried = 1.0 + f.coeff0 + f.coeff1;
            const Complex lhs0 = s * f.norm * (f.coeff0 + kCat.alpha / s * carried);
            const Complex lhs1 = s * f.norm * (f.coeff1 + kCat.beta / s * carried);
            worst_link = std::max({worst_link, rel_gap(lhs0, s * f.weight0),
                                   rel_gap(lhs1, s * f.weight1)});
        }
    }
    const bool pass = worst_norm < 1e-10 && worst_link < 1e-9;
    return {pass, "normalizing factor dual form rel " + fmt(worst_norm) +
                      " (limit 1e-10), weight/coefficient link rel " + fmt(worst_link) +
                      " (limit 1e-9)"};
}

Outcome transform_structure() {
    double worst_split = 0.0;
    double worst_mass = 0.0;
    double worst_p = 0.0;
    for (int j : kStartsWide) {
        for (double s : kFrequencies) {
            const auto triple = first_catastrophe_transform(kSchedule, kCat, j, s);
            worst_split = std::max(worst_split,
                                   std::abs(triple.alpha_part + triple.beta_part - triple.total));
        }
        const auto near_zero = first_catastrophe_transform(kSchedule, kCat, j, 1e-6);
        worst_mass = std::max(worst_mass, std::abs(near_zero.total - 1.0));
        const auto p = type_probabilities(kSchedule, kCat, j);
        worst_p = std::max(worst_p, std::abs(p.alpha_first + p.beta_first - 1.0));
    }
    const bool pass = worst_split < 1e-12 && worst_mass < 1e-4 && worst_p < 1e-9;
    return {pass, "transform split " + fmt(worst_split) + " (limit 1e-12), total mass at 1e-6 " +
                      fmt(worst_mass) + " (limit 1e-4), type probability sum " + fmt(worst_p) +
                      " (limit 1e-9)"};
}

Outcome moments_vs_simulation() {
    const auto t0 = Clock::now();
    double worst_z = 0.0;
    for (int j : kStartsNarrow) {
        const auto analytic = first_catastrophe_moments(kSchedule, kCat, j);
        const auto p = type_probabilities(kSchedule, kCat, j);
        const auto sim = estimate_first_catastrophe(kSchedule, kCat, j, 100000,
                                                    6061 + static_cast<std::uint64_t>(j));
        worst_z = std::max({worst_z, std::abs(analytic.mean - sim.mean_C) / sim.se_mean,
                            std::abs(analytic.variance - sim.variance_C) / sim.se_variance,
                            std::abs(p.alpha_first - sim.p_alpha_first) / sim.se_p_alpha});
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst_z <= 4.0 && elapsed < 120.0;
    std::string note = worst_z <= 3.0 ? "" : " (soft 3-SE band exceeded)";
    return {pass, "analytic moments vs 1e5-path simulation, max |z| " + fmt(worst_z) +
                      " (hard limit 4)" + note + ", " + fmt(elapsed) + " s (limit 120)"};
}

Outcome single_type_reduction() {
    double worst = 0.0;
    for (int j : kStartsNarrow) {
        const auto general_a = first_catastrophe_moments(kSchedule, CatastropheRates{0.7, 0.0}, j);
        const auto closed_a = single_type_moments(kSchedule, 0.7, SingleType::AlphaOnly, j);
        const auto general_b = first_catastrophe_moments(kSchedule, CatastropheRates{0.0, 0.7}, j);
        const auto closed_b = single_type_moments(kSchedule, 0.7, SingleType::BetaOnly, j);
        worst = std::max({worst, std::abs(general_a.mean - closed_a.mean),
                          std::abs(general_a.second_moment - closed_a.second_moment),
                          std::abs(general_b.mean - closed_b.mean),
                          std::abs(general_b.second_moment - closed_b.second_moment)});
    }
    return {worst < 1e-8, "limit-extrapolated moments vs one-type closed forms, worst gap " +
                              fmt(worst) + " (limit 1e-8)"};
}

Outcome density_sanity() {
    // nonnegativity of the raw inversion on (0, 20]
    double most_negative = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double t = 0.1 * k;
        most_negative = std::min(most_negative, first_catastrophe_density_raw(kSchedule, kCat, 0, t));
    }
    if (most_negative < -1e-6)
        return {false, "raw density dipped to " + fmt(most_negative) + " (limit -1e-6)"};

    // total mass over a horizon carrying all but 1e-4 of the distribution
    // (Markov bound through the mean); geometric segments keep every
    // quadrature call on a scale where the integrand is actually resolved
    const auto report = first_catastrophe_moments(kSchedule, kCat, 0);
    const double horizon = report.mean / 1e-4;
    QuadratureSettings quad;
    quad.abs_tol = 1e-4;
    double mass = 0.0;
    double left = 0.0;
    double right = std::min(horizon, 8.0 * report.mean);
    while (left < horizon) {
        mass += integrate_adaptive_scalar(
            [&](double t) { return first_catastrophe_density_raw(kSchedule, kCat, 0, t); }, left,
            right, quad);
        left = right;
        right = std::min(horizon, 4.0 * right);
    }
    if (std::abs(mass - 1.0) > 2e-3)
        return {false, "density mass over [0, " + fmt(horizon) + "] is " + fmt(mass) +
                           " (limit 1 +- 2e-3)"};

    // analytic cdf against the empirical one
    const std::vector<double> probes{0.5, 2.0, 5.0};
    const auto sim = estimate_first_catastrophe(kSchedule, kCat, 0, 100000, 8088, probes);
    double worst_z = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const double analytic = first_catastrophe_cdf(kSchedule, kCat, 0, probes[i]);
        worst_z = std::max(worst_z,
                           std::abs(analytic - sim.cdf[i].fraction) / sim.cdf[i].se);
    }
    const bool pass = worst_z <= 3.0;
    return {pass, "raw density floor " + fmt(most_negative) + ", mass " + fmt(mass) +
                      ", cdf vs empirical max |z| " + fmt(worst_z) + " (limit 3)"};
}

Outcome derivative_machinery() {
    double worst_fd = 0.0;
    const double h = 1e-4;
    for (int j : {0, 1}) {
        for (int n = 0; n <= 4; ++n) {
            for (double s : {0.8, 1.6}) {
                const double d = base_resolvent_derivative(kSchedule, j, n, s).real();
                auto f = [&](double x) {
                    return base_resolvent_entry(kSchedule, j, n, x).real();
                };
                const double coarse = (f(s + h) - f(s - h)) / (2.0 * h);
                const double fine = (f(s + h / 2) - f(s - h / 2)) / h;
                const double richardson = (4.0 * fine - coarse) / 3.0;
                worst_fd = std::max(worst_fd, std::abs(d - richardson) / std::abs(richardson));
            }
        }
    }

    double worst_slope = 0.0;
    for (int j : kStartsNarrow) {
        const auto vs = absorbed_value_slope_at_zero(kSchedule, kCat, j, 0);
        worst_slope = std::max(worst_slope, std::abs(vs.slope - vs.slope_check) /
                                                std::max(1.0, std::abs(vs.slope)));
    }
    const bool pass = worst_fd < 1e-6 && worst_slope < 1e-5;
    return {pass, "resolvent derivative vs finite differences rel " + fmt(worst_fd) +
                      " (limit 1e-6), zero-frequency slope routes rel " + fmt(worst_slope) +
                      " (limit 1e-5)"};
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_command(const std::string& command) {
    RunResult result;
    FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    if (pipe == nullptr) return result;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = std::fread(buffer, 1, sizeof buffer, pipe)) > 0)
        result.output.append(buffer, got);
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

Outcome cli_determinism() {
    const char* bin = std::getenv("BDCAT_BIN");
    if (bin == nullptr) return {false, "BDCAT_BIN is not set; cannot drive the executable"};

    const auto config_path = std::filesystem::temp_directory_path() /
                             ("bdcat_acceptance_" + std::to_string(::getpid()) + ".json");
    {
        std::ofstream out(config_path);
        out << R"({"model":{"rates":{"kind":"constant","lambda":1.0,"mu":1.25},)"
            << R"("alpha":0.4,"beta":0.3}})";
    }
    const std::string base = std::string("'") + bin + "' ";
    const std::string sim_args =
        "simulate --seed 97531 --reps 2000 --config '" + config_path.string() + "'";
    const auto first = run_command(base + sim_args);
    const auto second = run_command(base + sim_args);
    const auto check = run_command(base + "crosscheck --config '" + config_path.string() + "'");
    std::filesystem::remove(config_path);

    if (first.exit_code != 0 || second.exit_code != 0)
        return {false, "simulate exited with " + std::to_string(first.exit_code) + " / " +
                           std::to_string(second.exit_code)};
    if (first.output != second.output)
        return {false, "repeated simulate runs differ"};
    if (check.exit_code != 0)
        return {false, "crosscheck exited with " + std::to_string(check.exit_code)};
    return {true, "repeated simulate byte-identical, full crosscheck suite exit 0"};
}

} // namespace

int main() {
    const struct {
        const char* name;
        std::function<Outcome()> run;
    } criteria[] = {
        {"resolvent identity", resolvent_identity},
        {"transition rows", transition_rows},
        {"absorbed resolvent", absorbed_triple},
        {"normalizing factor", norm_and_coefficients},
        {"transform structure", transform_structure},
        {"moments vs simulation", moments_vs_simulation},
        {"single-type reduction", single_type_reduction},
        {"density sanity", density_sanity},
        {"derivative machinery", derivative_machinery},
        {"cli determinism", cli_determinism},
    };

    int failed = 0;
    int index = 0;
    for (const auto& criterion : criteria) {
        ++index;
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failed;
        std::printf("criterion %2d %s  %s: %s\n", index, outcome.pass ? "PASS" : "FAIL",
                    criterion.name, outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
