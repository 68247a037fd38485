#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "bdcat/errors.hpp"
#include "bdcat/resolvent.hpp"
#include "bdcat/rng.hpp"
#include "dense_oracle.hpp"
#include "oracles.hpp"

using namespace bdcat;

namespace {

const RateSchedule kPreset = RateSchedule::constant(1.0, 1.25);

double rel_gap(Complex a, Complex b) { return std::abs(a - b) / (std::abs(b) + 1e-30); }

} // namespace

TEST_CASE("constant-rate entry (0,0) matches the closed form") {
    const double closed = oracle::constant_rate_resolvent00(1.0, 1.25, 1.0);
    const Complex computed = base_resolvent_entry(kPreset, 0, 0, 1.0);
    CHECK(std::abs(computed.imag()) < 1e-15);
    CHECK(computed.real() == doctest::Approx(closed).epsilon(1e-12));
    // frozen value, so a regression cannot hide behind the oracle
    CHECK(computed.real() == doctest::Approx(0.6433981132056603).epsilon(1e-12));

    for (double s : {0.3, 0.7, 2.0, 5.0}) {
        const Complex v = base_resolvent_entry(kPreset, 0, 0, s);
        CHECK(v.real() == doctest::Approx(oracle::constant_rate_resolvent00(1.0, 1.25, s))
                              .epsilon(1e-11));
    }
}

TEST_CASE("rows match a dense LU solve of the same killed truncation") {
    auto g = Xoshiro256pp::seeded(2026);
    for (int rep = 0; rep < 8; ++rep) {
        const auto schedule = oracle::random_table_schedule(g, 1 + static_cast<int>(g.next() % 5));
        const int start = static_cast<int>(g.next() % 7);
        const Complex s(0.2 + 3.0 * g.uniform01(), 4.0 * g.uniform01() - 2.0);
        const std::size_t level = 80;

        const auto mine = base_resolvent_row_at(schedule, start, s, level);
        const auto dense = oracle::dense_base_row(schedule, start, s, static_cast<int>(level));
        REQUIRE(mine.size() == dense.size());
        for (std::size_t n = 0; n < mine.size(); ++n)
            CHECK(std::abs(mine[n] - dense[n]) < 1e-12 * (std::abs(dense[n]) + 1.0));
    }
}

TEST_CASE("refined rows agree with a large fixed-size dense solve") {
    // The refinement loop picks its own truncation; at these frequencies the
    // tail is far below tolerance by N = 240, so a dense solve at that size
    // is an oracle for the infinite system.
    const Complex probes[] = {Complex(0.5), Complex(1.0), Complex(3.0), Complex(2.0, 3.0)};
    for (const Complex s : probes) {
        for (int start : {0, 5}) {
            const auto row = base_resolvent_row(kPreset, start, s);
            REQUIRE(row.converged);
            const auto dense = oracle::dense_base_row(kPreset, start, s, 240);
            for (int n = 0; n <= 10; ++n) CHECK(rel_gap(row.at(n), dense[n]) < 1e-10);
        }
    }
    CHECK(rel_gap(base_resolvent_entry(kPreset, 5, 5, Complex(2.0, 3.0)),
                  oracle::dense_base_row(kPreset, 5, Complex(2.0, 3.0), 240)[5]) < 1e-10);
}

TEST_CASE("honesty: s times the row sum is 1 at convergence") {
    auto g = Xoshiro256pp::seeded(99);
    for (int rep = 0; rep < 6; ++rep) {
        const auto schedule = oracle::random_table_schedule(g, 1 + static_cast<int>(g.next() % 4));
        const double s = 0.4 + 2.0 * g.uniform01();
        const auto row = base_resolvent_row(schedule, static_cast<int>(g.next() % 4), s);
        REQUIRE(row.converged);
        CHECK(std::abs(s * row.sum() - 1.0) < 1e-8);
    }
}

TEST_CASE("positivity and the 1/s bound for real frequencies") {
    for (double s : {0.5, 1.0, 3.0}) {
        const auto row = base_resolvent_row(kPreset, 2, s);
        for (const Complex& v : row.entries) {
            CHECK(v.real() >= 0.0);
            CHECK(v.real() <= 1.0 / s + 1e-12);
            CHECK(std::abs(v.imag()) < 1e-15);
        }
    }
}

TEST_CASE("entries satisfy the defining linear system") {
    const double s = 1.0;
    const auto row = base_resolvent_row(kPreset, 3, s);
    REQUIRE(row.converged);
    CHECK(row.residual < 1e-10);
    const auto& x = row.entries;
    // forward system: s*x_n - sum_k x_k q(k,n) = [n == start]
    for (std::size_t n = 0; n + 1 < x.size() && n < 40; ++n) {
        Complex flow = -kPreset.exit_rate(static_cast<long long>(n)) * x[n];
        if (n >= 1) flow += kPreset.birth(static_cast<long long>(n - 1)) * x[n - 1];
        flow += kPreset.death(static_cast<long long>(n + 1)) * x[n + 1];
        const Complex lhs = s * x[n] - flow;
        const double expect = (static_cast<int>(n) == 3) ? 1.0 : 0.0;
        CHECK(std::abs(lhs - expect) < 1e-10);
    }
}

TEST_CASE("killed truncation grows monotonically toward the limit") {
    const double s = 0.8;
    const auto coarse = base_resolvent_row_at(kPreset, 1, s, 64);
    const auto fine = base_resolvent_row_at(kPreset, 1, s, 128);
    for (std::size_t n = 0; n < coarse.size(); ++n)
        CHECK(coarse[n].real() <= fine[n].real() + 1e-15);
}

TEST_CASE("out-of-window targets read as zero") {
    const auto row = base_resolvent_row(kPreset, 0, 1.0);
    CHECK(row.at(static_cast<long long>(row.truncation_level) + 5) == Complex(0.0));
    CHECK(row.at(-3) == Complex(0.0));
}

TEST_CASE("frequency derivative matches central finite differences") {
    const double h = 1e-4;
    for (int start : {0, 2}) {
        for (int target : {0, 1, 4}) {
            const double s = 1.0;
            const Complex d = base_resolvent_derivative(kPreset, start, target, s);
            auto f = [&](double x) {
                return base_resolvent_entry(kPreset, start, target, x).real();
            };
            const double coarse = (f(s + h) - f(s - h)) / (2.0 * h);
            const double fine = (f(s + h / 2) - f(s - h / 2)) / h;
            const double richardson = (4.0 * fine - coarse) / 3.0;
            CHECK(std::abs(d.real() - richardson) / std::abs(richardson) < 1e-6);
        }
    }
}

TEST_CASE("derivative row has the analytic structure") {
    const double s = 1.3;
    const auto pair = base_resolvent_row_with_derivative(kPreset, 2, s);
    REQUIRE(pair.row.converged);
    REQUIRE(pair.derivative.converged);

    // diagonal entries strictly decrease in s
    CHECK(pair.derivative.at(2).real() < 0.0);

    // differentiating the honesty identity: sum of the derivative row
    // approaches -1/s^2
    CHECK(std::abs(pair.derivative.sum().real() + 1.0 / (s * s)) < 1e-7);

    // the pair form agrees with the standalone operations
    const auto row = base_resolvent_row(kPreset, 2, s);
    const auto drow = base_resolvent_derivative_row(kPreset, 2, s);
    for (int n = 0; n <= 10; ++n) {
        CHECK(rel_gap(pair.row.at(n), row.at(n)) < 1e-12);
        CHECK(rel_gap(pair.derivative.at(n), drow.at(n)) < 1e-12);
    }
}

TEST_CASE("critical chain at small frequency exhausts the level cap") {
    // birth == death makes the chain diffusive: the killed boundary is felt
    // over ~1/sqrt(s) levels, so at s = 1e-4 a cap of 256 cannot settle to
    // rel_tol and the row must be reported unconverged
    const auto schedule = RateSchedule::constant(1.0, 1.0);
    TruncationPolicy tight;
    tight.initial_level = 16;
    tight.max_level = 256;
    const auto row = base_resolvent_row(schedule, 0, 1e-4, tight);
    CHECK_FALSE(row.converged);
    CHECK_THROWS_AS(base_resolvent_entry(schedule, 0, 0, 1e-4, tight), TruncationError);
}

TEST_CASE("frequencies outside the right half-plane are rejected") {
    CHECK_THROWS_AS(base_resolvent_row(kPreset, 0, Complex(0.0, 1.0)), DomainError);
    CHECK_THROWS_AS(base_resolvent_row(kPreset, 0, Complex(-0.5, 0.0)), DomainError);
    CHECK_THROWS_AS(base_resolvent_entry(kPreset, -1, 0, 1.0), DomainError);
}
