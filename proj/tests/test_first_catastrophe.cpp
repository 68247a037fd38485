#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "bdcat/catastrophe.hpp"
#include "bdcat/errors.hpp"
#include "bdcat/first_catastrophe.hpp"
#include "bdcat/quadrature.hpp"
#include "bdcat/simulate.hpp"

using namespace bdcat;

namespace {

const RateSchedule kSchedule = RateSchedule::constant(1.0, 1.25);
const CatastropheRates kCat{0.4, 0.3};

double rel_gap(Complex a, Complex b) { return std::abs(a - b) / (std::abs(b) + 1e-30); }

} // namespace

TEST_CASE("transform parts add up to the total transform") {
    for (int start : {0, 1, 2, 5}) {
        for (double s : {0.5, 1.0, 3.0}) {
            const auto triple = first_catastrophe_transform(kSchedule, kCat, start, s);
            CHECK(std::abs(triple.alpha_part + triple.beta_part - triple.total) < 1e-12);
        }
    }
}

TEST_CASE("transform parts equal the absorbed-state resolvent entries") {
    // The sub-density transforms are s times the resolvent weight of the
    // matching absorbing state; the direct linear-system solve provides the
    // independent value.
    for (int start : {0, 1, 5}) {
        for (double s : {0.5, 1.0, 3.0}) {
            const auto triple = first_catastrophe_transform(kSchedule, kCat, start, s);
            const auto direct = absorbed_resolvent_direct(kSchedule, kCat, start, s);
            CHECK(rel_gap(triple.alpha_part, s * direct.alpha_absorbed) < 1e-9);
            CHECK(rel_gap(triple.beta_part, s * direct.beta_absorbed) < 1e-9);
        }
    }
}

TEST_CASE("the catastrophe time is almost surely finite") {
    for (int start : {0, 1, 5}) {
        const auto triple = first_catastrophe_transform(kSchedule, kCat, start, 1e-6);
        CHECK(std::abs(triple.total - 1.0) < 1e-4);
    }
}

TEST_CASE("one-type models put all transform mass on that type") {
    const CatastropheRates alpha_only{0.7, 0.0};
    const CatastropheRates beta_only{0.0, 0.7};
    for (double s : {0.5, 2.0}) {
        CHECK(std::abs(first_catastrophe_transform(kSchedule, alpha_only, 2, s).beta_part) <
              1e-15);
        CHECK(std::abs(first_catastrophe_transform(kSchedule, beta_only, 2, s).alpha_part) <
              1e-15);
    }
}

TEST_CASE("type probabilities: degenerate and general cases") {
    const auto alpha_only = type_probabilities(kSchedule, CatastropheRates{0.7, 0.0}, 3);
    CHECK(alpha_only.alpha_first == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(alpha_only.beta_first == doctest::Approx(0.0).scale(1).epsilon(1e-12));

    const auto beta_only = type_probabilities(kSchedule, CatastropheRates{0.0, 0.7}, 3);
    CHECK(beta_only.alpha_first == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(beta_only.beta_first == doctest::Approx(1.0).epsilon(1e-12));

    for (int start : {0, 1, 5}) {
        const auto p = type_probabilities(kSchedule, kCat, start);
        CHECK(p.alpha_first >= 0.0);
        CHECK(p.alpha_first <= 1.0);
        CHECK(std::abs(p.alpha_first + p.beta_first - 1.0) < 1e-9);
    }
}

TEST_CASE("type probabilities match simulation") {
    const auto p = type_probabilities(kSchedule, kCat, 5);
    const auto sim = estimate_first_catastrophe(kSchedule, kCat, 5, 20000, 8101);
    const double z = std::abs(p.alpha_first - sim.p_alpha_first) / sim.se_p_alpha;
    CHECK(z < 4.0);
}

TEST_CASE("moments match simulation") {
    for (int start : {0, 1, 5}) {
        const auto report = first_catastrophe_moments(kSchedule, kCat, start);
        const auto sim = estimate_first_catastrophe(kSchedule, kCat, start, 20000,
                                                    9201 + static_cast<std::uint64_t>(start));
        CHECK(std::abs(report.mean - sim.mean_C) / sim.se_mean < 4.0);
        CHECK(std::abs(report.variance - sim.variance_C) / sim.se_variance < 4.0);
    }
}

TEST_CASE("moment reports are internally consistent") {
    for (int start : {0, 2, 5}) {
        const auto report = first_catastrophe_moments(kSchedule, kCat, start);
        CHECK(report.mean > 0.0);
        CHECK(report.variance >= 0.0);
        CHECK(report.second_moment >= report.mean * report.mean);
        CHECK(report.variance ==
              doctest::Approx(report.second_moment - report.mean * report.mean).epsilon(1e-12));
        CHECK(report.truncation_level > 0);
    }
}

TEST_CASE("general moments reduce to the one-type closed forms") {
    for (int start : {0, 1, 5}) {
        const auto general =
            first_catastrophe_moments(kSchedule, CatastropheRates{0.7, 0.0}, start);
        const auto closed = single_type_moments(kSchedule, 0.7, SingleType::AlphaOnly, start);
        CHECK(std::abs(general.mean - closed.mean) < 1e-8 * std::max(1.0, closed.mean));
        CHECK(std::abs(general.second_moment - closed.second_moment) <
              1e-8 * std::max(1.0, closed.second_moment));
        CHECK(closed.p_alpha_first == 1.0);

        const auto general_b =
            first_catastrophe_moments(kSchedule, CatastropheRates{0.0, 0.7}, start);
        const auto closed_b = single_type_moments(kSchedule, 0.7, SingleType::BetaOnly, start);
        CHECK(std::abs(general_b.mean - closed_b.mean) < 1e-8 * std::max(1.0, closed_b.mean));
        CHECK(std::abs(general_b.second_moment - closed_b.second_moment) <
              1e-8 * std::max(1.0, closed_b.second_moment));
        CHECK(closed_b.p_beta_first == 1.0);
    }
}

TEST_CASE("dominant alpha rate pins the mean near its floor") {
    // From start 3 an alpha event is always effective, so the mean sits just
    // above the 1/alpha cost of waiting for the first alpha event.
    const double alpha = 50.0;
    const auto closed = single_type_moments(kSchedule, alpha, SingleType::AlphaOnly, 3);
    CHECK(closed.mean > 1.0 / alpha);
    CHECK(closed.mean < 1.01 / alpha);
}

TEST_CASE("one-type mean always exceeds the bare event-waiting time") {
    for (int start : {0, 1, 4}) {
        const auto closed = single_type_moments(kSchedule, 0.7, SingleType::AlphaOnly, start);
        CHECK(closed.mean > 1.0 / 0.7);
    }
}

TEST_CASE("density values are sane on the preset") {
    double last_cdf = 0.0;
    for (double t : {0.5, 1.0, 2.0, 5.0, 12.0}) {
        const double raw = first_catastrophe_density_raw(kSchedule, kCat, 0, t);
        CHECK(raw > -1e-6);
        CHECK(first_catastrophe_density(kSchedule, kCat, 0, t) >= 0.0);
        const double cdf = first_catastrophe_cdf(kSchedule, kCat, 0, t);
        CHECK(cdf > last_cdf);  // strictly increasing on the support
        CHECK(cdf < 1.0 + 1e-6);
        last_cdf = cdf;
    }
}

TEST_CASE("integrated density matches the cdf increment") {
    QuadratureSettings quad;
    quad.abs_tol = 1e-7;
    const double mass = integrate_adaptive_scalar(
        [&](double t) { return first_catastrophe_density_raw(kSchedule, kCat, 0, t); }, 2.0, 5.0,
        quad);
    const double increment = first_catastrophe_cdf(kSchedule, kCat, 0, 5.0) -
                             first_catastrophe_cdf(kSchedule, kCat, 0, 2.0);
    CHECK(std::abs(mass - increment) < 1e-5);
}

TEST_CASE("zero-frequency value and slope carry their own cross-check") {
    for (int target : {0, 1}) {
        const auto vs = absorbed_value_slope_at_zero(kSchedule, kCat, 5, target);
        CHECK(vs.value > 0.0);
        CHECK(vs.slope < 0.0);  // resolvent entries decrease in the frequency
        CHECK(std::abs(vs.slope - vs.slope_check) <= 1e-6 * std::max(1.0, std::abs(vs.slope)));
    }
}

TEST_CASE("absorbed-resolvent slope matches finite differences") {
    const double s = 0.5;
    const double h = 1e-4;
    for (int target : {0, 1}) {
        const Complex d = absorbed_resolvent_slope(kSchedule, kCat, 2, target, s);
        auto f = [&](double x) {
            return absorbed_resolvent_entry(kSchedule, kCat, 2, target, x).real();
        };
        const double coarse = (f(s + h) - f(s - h)) / (2.0 * h);
        const double fine = (f(s + h / 2) - f(s - h / 2)) / h;
        const double richardson = (4.0 * fine - coarse) / 3.0;
        CHECK(std::abs(d.real() - richardson) / std::abs(richardson) < 1e-6);
    }
}

TEST_CASE("catastrophe-free models are rejected by the whole layer") {
    const CatastropheRates none{0.0, 0.0};
    CHECK_THROWS_AS(first_catastrophe_transform(kSchedule, none, 0, 1.0), DomainError);
    CHECK_THROWS_AS(type_probabilities(kSchedule, none, 0), DomainError);
    CHECK_THROWS_AS(first_catastrophe_moments(kSchedule, none, 0), DomainError);
    CHECK_THROWS_AS(first_catastrophe_density(kSchedule, none, 0, 1.0), DomainError);
    CHECK_THROWS_AS(first_catastrophe_cdf(kSchedule, none, 0, 1.0), DomainError);
}

TEST_CASE("single-type moments demand a positive rate") {
    CHECK_THROWS_AS(single_type_moments(kSchedule, 0.0, SingleType::AlphaOnly, 0), DomainError);
    CHECK_THROWS_AS(single_type_moments(kSchedule, -0.5, SingleType::BetaOnly, 0), DomainError);
}
