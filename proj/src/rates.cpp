#include "bdcat/rates.hpp"

#include <cmath>
#include <stdexcept>

#include "bdcat/errors.hpp"
#include "bdcat/truncation.hpp"

namespace bdcat {

RateSchedule RateSchedule::constant(double birth, double death) {
    RateSchedule s;
    s.kind_ = Kind::Constant;
    s.birth_offset_ = birth;
    s.death_offset_ = death;
    return s;
}

RateSchedule RateSchedule::affine(double birth_slope, double birth_offset,
                                  double death_slope, double death_offset) {
    RateSchedule s;
    s.kind_ = Kind::Affine;
    s.birth_slope_ = birth_slope;
    s.birth_offset_ = birth_offset;
    s.death_slope_ = death_slope;
    s.death_offset_ = death_offset;
    return s;
}

RateSchedule RateSchedule::table(std::vector<double> birth_table, std::vector<double> death_table) {
    if (birth_table.empty() || death_table.empty()) {
        throw std::invalid_argument("RateSchedule::table: tables must be non-empty");
    }
    RateSchedule s;
    s.kind_ = Kind::Table;
    s.birth_table_ = std::move(birth_table);
    s.death_table_ = std::move(death_table);
    return s;
}

double RateSchedule::birth(long long level) const {
    if (level < 0) throw std::invalid_argument("birth rate queried at negative level");
    switch (kind_) {
        case Kind::Constant:
            return birth_offset_;
        case Kind::Affine:
            return birth_slope_ * static_cast<double>(level + 1) + birth_offset_;
        case Kind::Table: {
            const auto idx = static_cast<std::size_t>(level);
            return idx < birth_table_.size() ? birth_table_[idx] : birth_table_.back();
        }
    }
    return 0.0;  // unreachable
}

double RateSchedule::death(long long level) const {
    if (level < 0) throw std::invalid_argument("death rate queried at negative level");
    if (level == 0) return 0.0;
    switch (kind_) {
        case Kind::Constant:
            return death_offset_;
        case Kind::Affine:
            return death_slope_ * static_cast<double>(level) + death_offset_;
        case Kind::Table: {
            const auto idx = static_cast<std::size_t>(level - 1);
            return idx < death_table_.size() ? death_table_[idx] : death_table_.back();
        }
    }
    return 0.0;  // unreachable
}

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void append(std::vector<std::string>& out, const std::string& msg) { out.push_back(msg); }

} // namespace

void RateSchedule::collect_violations(std::vector<std::string>& out) const {
    switch (kind_) {
        case Kind::Constant:
            if (!positive_finite(birth_offset_))
                append(out, "birth rate must be > 0 and finite for constant schedules");
            if (!positive_finite(death_offset_))
                append(out, "death rate must be > 0 and finite for constant schedules");
            break;
        case Kind::Affine:
            if (!std::isfinite(birth_slope_) || !std::isfinite(birth_offset_) ||
                !std::isfinite(death_slope_) || !std::isfinite(death_offset_)) {
                append(out, "affine coefficients must be finite");
                break;
            }
            // birth(i) = slope*(i+1) + offset is minimized at i = 0 when the
            // slope is nonnegative; a negative slope fails at some level.
            if (birth_slope_ < 0.0)
                append(out, "affine birth slope must be >= 0 (rates turn negative otherwise)");
            if (!(birth(0) > 0.0)) append(out, "birth(0) must be > 0");
            if (death_slope_ < 0.0)
                append(out, "affine death slope must be >= 0 (rates turn negative otherwise)");
            if (!(death(1) > 0.0)) append(out, "death(1) must be > 0");
            break;
        case Kind::Table:
            for (std::size_t i = 0; i < birth_table_.size(); ++i) {
                if (!positive_finite(birth_table_[i])) {
                    append(out, "birth table entry at level " + std::to_string(i) +
                                    " must be > 0 and finite");
                }
            }
            for (std::size_t i = 0; i < death_table_.size(); ++i) {
                if (!positive_finite(death_table_[i])) {
                    append(out, "death table entry for level " + std::to_string(i + 1) +
                                    " must be > 0 and finite");
                }
            }
            break;
    }
}

ValidationReport validate_model(const RateSchedule& schedule, const CatastropheRates& cat) {
    ValidationReport report;
    schedule.collect_violations(report.violations);
    if (!std::isfinite(cat.alpha) || cat.alpha < 0.0)
        report.violations.push_back("alpha must be >= 0 and finite");
    if (!std::isfinite(cat.beta) || cat.beta < 0.0)
        report.violations.push_back("beta must be >= 0 and finite");
    return report;
}

Model standard_model() {
    Model m;
    m.rates = RateSchedule::constant(1.0, 1.25);
    m.catastrophe = CatastropheRates{0.4, 0.3};
    return m;
}

void TruncationPolicy::validate() const {
    if (initial_level < 8) throw ConfigError("truncation initial_level must be >= 8");
    if (growth_factor < 2) throw ConfigError("truncation growth_factor must be >= 2");
    if (!(rel_tol > 0.0) || !(rel_tol < 1.0))
        throw ConfigError("truncation rel_tol must lie in (0, 1)");
    if (initial_level >= max_level)
        throw ConfigError("truncation initial_level must be below max_level");
}

} // namespace bdcat
