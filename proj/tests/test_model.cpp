#include <doctest.h>

#include <cmath>
#include <string>

#include "bdcat/generator.hpp"
#include "bdcat/rates.hpp"
#include "bdcat/rng.hpp"
#include "oracles.hpp"

using namespace bdcat;

namespace {

bool mentions(const ValidationReport& report, const std::string& needle) {
    for (const auto& v : report.violations)
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("standard preset validates cleanly") {
    const Model m = standard_model();
    CHECK(m.rates.birth(7) == 1.0);
    CHECK(m.rates.death(7) == 1.25);
    CHECK(m.catastrophe.alpha == 0.4);
    CHECK(m.catastrophe.beta == 0.3);
    CHECK(validate_model(m).ok());
}

TEST_CASE("affine schedule with zero birth rate at level 0 is refused") {
    // birth(i) = i, so birth(0) = 0: not a valid birth-death model
    const auto schedule = RateSchedule::affine(1.0, -1.0, 1.25, 0.0);
    CHECK(schedule.birth(0) == 0.0);
    CHECK(schedule.birth(3) == 3.0);
    const auto report = validate_model(schedule, CatastropheRates{0.1, 0.1});
    CHECK_FALSE(report.ok());
    CHECK(mentions(report, "birth(0)"));
}

TEST_CASE("negative catastrophe rate is refused") {
    const auto report =
        validate_model(RateSchedule::constant(1.0, 1.25), CatastropheRates{-0.1, 0.3});
    CHECK_FALSE(report.ok());
    CHECK(mentions(report, "alpha"));
}

TEST_CASE("all violations are reported at once") {
    const auto report = validate_model(RateSchedule::constant(0.0, -1.0),
                                       CatastropheRates{-1.0, -2.0});
    CHECK(report.violations.size() == 4);
}

TEST_CASE("table schedules repeat the last entry past the end") {
    const auto schedule = RateSchedule::table({1.0, 2.0, 3.0}, {0.5});
    CHECK(schedule.birth(2) == 3.0);
    CHECK(schedule.birth(9) == 3.0);
    CHECK(schedule.death(1) == 0.5);
    CHECK(schedule.death(40) == 0.5);
    CHECK(schedule.death(0) == 0.0);
}

TEST_CASE("base generator rows match the hand-written entries") {
    const Model m = standard_model();

    auto row0 = base_generator_row(m, 0);
    CHECK(row0.at(0) == -1.0);
    CHECK(row0.at(1) == 1.0);
    CHECK(row0.entries.size() == 2);

    auto row3 = base_generator_row(m, 3);
    CHECK(row3.at(2) == 1.25);
    CHECK(row3.at(3) == -2.25);
    CHECK(row3.at(4) == 1.0);

    for (int i = 0; i < 12; ++i)
        CHECK(std::abs(base_generator_row(m, i).row_sum()) < 1e-14);
}

TEST_CASE("full generator folds the catastrophe moves in") {
    const Model m = standard_model();

    // level 0: the beta jump to 1 merges with the birth entry
    auto row0 = full_generator_row(m, 0);
    CHECK(row0.at(0) == doctest::Approx(-1.3).epsilon(1e-15));
    CHECK(row0.at(1) == doctest::Approx(1.3).epsilon(1e-15));

    // level 1: the alpha jump to 0 merges with the death entry
    auto row1 = full_generator_row(m, 1);
    CHECK(row1.at(0) == doctest::Approx(1.65).epsilon(1e-15));
    CHECK(row1.at(1) == doctest::Approx(-2.65).epsilon(1e-15));
    CHECK(row1.at(2) == doctest::Approx(1.0).epsilon(1e-15));

    // level 3: both catastrophe rates appear as separate entries
    auto row3 = full_generator_row(m, 3);
    CHECK(row3.at(0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(row3.at(1) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(row3.at(3) == doctest::Approx(-2.95).epsilon(1e-15));
}

TEST_CASE("full generator without catastrophes equals the base generator") {
    Model m = standard_model();
    m.catastrophe = CatastropheRates{0.0, 0.0};
    for (int i = 0; i < 8; ++i) {
        const auto full = full_generator_row(m, i);
        const auto base = base_generator_row(m, i);
        CHECK(full.entries == base.entries);
    }
}

TEST_CASE("absorbed generator rows") {
    const Model m = standard_model();

    CHECK(absorbed_generator_row(m, kAlphaAbsorbed).entries.empty());
    CHECK(absorbed_generator_row(m, kBetaAbsorbed).entries.empty());

    // level 0: only beta is effective (alpha from 0 does not move the chain)
    auto row0 = absorbed_generator_row(m, 0);
    CHECK(row0.at(kBetaAbsorbed) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(row0.at(kAlphaAbsorbed) == 0.0);
    CHECK(row0.at(0) == doctest::Approx(-1.3).epsilon(1e-15));
    CHECK(row0.at(1) == doctest::Approx(1.0).epsilon(1e-15));

    // level 1: only alpha is effective
    auto row1 = absorbed_generator_row(m, 1);
    CHECK(row1.at(kAlphaAbsorbed) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(row1.at(kBetaAbsorbed) == 0.0);
    CHECK(row1.at(0) == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(row1.at(1) == doctest::Approx(-2.65).epsilon(1e-15));
    CHECK(row1.at(2) == doctest::Approx(1.0).epsilon(1e-15));

    // level 2 and up: both types absorb; the beta mass goes to the absorbing
    // state, not to level 1
    auto row2 = absorbed_generator_row(m, 2);
    CHECK(row2.at(kAlphaAbsorbed) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(row2.at(kBetaAbsorbed) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(row2.at(1) == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(row2.at(2) == doctest::Approx(-2.95).epsilon(1e-15));
    CHECK(row2.at(3) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("generator structure holds on random schedules") {
    auto g = Xoshiro256pp::seeded(71);
    for (int rep = 0; rep < 40; ++rep) {
        Model m;
        m.rates = oracle::random_table_schedule(g, 1 + static_cast<int>(g.next() % 6));
        m.catastrophe = CatastropheRates{3.0 * g.uniform01(), 3.0 * g.uniform01()};
        REQUIRE(validate_model(m).ok());

        for (int i = 0; i < 10; ++i) {
            const auto base = base_generator_row(m, i);
            const auto full = full_generator_row(m, i);
            const auto absorbed = absorbed_generator_row(m, i);

            for (const auto& [n, rate] : full.entries) {
                if (n == i) CHECK(rate <= 0.0);
                else CHECK(rate >= 0.0);
            }
            CHECK(std::abs(base.row_sum()) < 1e-12);
            CHECK(std::abs(full.row_sum()) < 1e-12);
            CHECK(std::abs(absorbed.row_sum()) < 1e-12);

            // full row = base row + catastrophe displacement, entrywise
            for (int n = -1; n <= 11; ++n) {
                double shed = 0.0;
                if (n == 0) shed += m.catastrophe.alpha * (i != 0 ? 1.0 : 0.0);
                if (n == 1) shed += m.catastrophe.beta * (i != 1 ? 1.0 : 0.0);
                if (n == i) {
                    shed -= m.catastrophe.alpha * (i != 0 ? 1.0 : 0.0);
                    shed -= m.catastrophe.beta * (i != 1 ? 1.0 : 0.0);
                }
                CHECK(full.at(n) == doctest::Approx(base.at(n) + shed).epsilon(1e-13));
            }

            // the absorbed row moves exactly the effective catastrophe mass
            // from the diagonal to the absorbing states
            const double absorbed_mass =
                absorbed.at(kAlphaAbsorbed) + absorbed.at(kBetaAbsorbed);
            CHECK(absorbed.at(i) == doctest::Approx(base.at(i) - absorbed_mass).epsilon(1e-13));
            for (int n = 0; n <= 11; ++n) {
                if (n == i) continue;
                CHECK(absorbed.at(n) == base.at(n));
            }
        }
    }
}
