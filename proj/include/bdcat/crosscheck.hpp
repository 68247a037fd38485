#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bdcat/config.hpp"
#include "bdcat/rates.hpp"

namespace bdcat {

struct CheckResult {
    enum class Status { Pass, Fail, Skipped };

    std::string name;
    Status status = Status::Pass;
    double measured = 0.0;   // worst observed error (or |z| for statistical checks)
    double threshold = 0.0;
    std::string note;        // failure diagnostics or skip reason
};

struct CrosscheckReport {
    std::vector<CheckResult> checks;

    bool all_passed() const;  // Skipped does not count against passing
};

/// Runs the full consistency suite on one model: resolvent identity vs the
/// direct linear solve, time-domain formula vs full-generator uniformization,
/// the three absorbed-resolvent routes against each other, the dual forms of
/// the normalizing factor, transform/limit identities, moments and type
/// probabilities against Monte Carlo, density normalization, and simulator
/// determinism. Checks that require catastrophes are marked Skipped when
/// alpha = beta = 0. Numeric failures inside a check mark it Failed (with
/// the exception text in `note`) instead of escaping.
CrosscheckReport run_crosscheck(const Model& model, const NumericsConfig& numerics,
                                std::uint64_t seed, std::size_t replications);

} // namespace bdcat
