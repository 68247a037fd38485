#pragma once

#include <string>
#include <vector>

namespace bdcat {

/// Per-level birth/death rates of the underlying chain. Levels are 0,1,2,...;
/// birth(i) is the rate i -> i+1 (defined for i >= 0), death(i) the rate
/// i -> i-1 (defined for i >= 1; death(0) is fixed at 0).
///
/// Three shapes are supported:
///  - constant:  birth(i) = b, death(i) = d
///  - affine:    birth(i) = b*(i+1) + cb, death(i) = d*i + cd
///  - table:     explicit per-level values; past the end of a table the last
///               entry repeats, so the schedule is defined for every level
class RateSchedule {
public:
    enum class Kind { Constant, Affine, Table };

    static RateSchedule constant(double birth, double death);
    static RateSchedule affine(double birth_slope, double birth_offset,
                               double death_slope, double death_offset);
    /// birth_table[k] is birth(k) for k = 0..; death_table[k] is death(k+1).
    /// Both tables must be non-empty.
    static RateSchedule table(std::vector<double> birth_table,
                              std::vector<double> death_table);

    Kind kind() const { return kind_; }

    double birth(long long level) const;
    double death(long long level) const;
    /// Total outflow rate of level i in the catastrophe-free chain:
    /// birth(i) + death(i).
    double exit_rate(long long level) const { return birth(level) + death(level); }

    /// Appends a description of every positivity violation to `out`
    /// (empty result means the schedule is a valid model ingredient).
    void collect_violations(std::vector<std::string>& out) const;

private:
    RateSchedule() = default;

    Kind kind_ = Kind::Constant;
    double birth_slope_ = 0.0;
    double birth_offset_ = 0.0;
    double death_slope_ = 0.0;
    double death_offset_ = 0.0;
    std::vector<double> birth_table_;
    std::vector<double> death_table_;
};

/// Rates of the two catastrophe types. An alpha event resets the level to 0,
/// a beta event resets it to 1; both are level-independent.
struct CatastropheRates {
    double alpha = 0.0;
    double beta = 0.0;

    double total() const { return alpha + beta; }
};

struct Model {
    RateSchedule rates = RateSchedule::constant(1.0, 1.0);
    CatastropheRates catastrophe;

    bool has_catastrophes() const { return catastrophe.total() > 0.0; }
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Checks every structural constraint: birth rates positive for all levels,
/// death rates positive from level 1 up, catastrophe rates non-negative and
/// finite. Returns the full list of violations, not just the first.
ValidationReport validate_model(const RateSchedule& schedule, const CatastropheRates& cat);

inline ValidationReport validate_model(const Model& model) {
    return validate_model(model.rates, model.catastrophe);
}

/// Convenience preset used across tests and docs: constant births 1.0,
/// constant deaths 1.25, alpha = 0.4, beta = 0.3.
Model standard_model();

} // namespace bdcat
