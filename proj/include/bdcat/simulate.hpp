#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bdcat/rates.hpp"
#include "bdcat/rng.hpp"

namespace bdcat {

struct PathEvent {
    enum class Kind { Birth, Death, AlphaCatastrophe, BetaCatastrophe };

    double time = 0.0;  // absolute time of the event
    Kind kind = Kind::Birth;
    int state_before = 0;
    int state_after = 0;
    /// For catastrophe events: whether the event moved the chain (an alpha
    /// event from level 0 and a beta event from level 1 change nothing and
    /// are recorded with effective = false). Birth/death events always carry
    /// effective = true.
    bool effective = true;
};

struct Path {
    int start = 0;
    std::vector<PathEvent> events;
};

/// Empirical CDF probe: fraction of replications with first catastrophe at
/// or before `time`.
struct CdfPoint {
    double time = 0.0;
    double fraction = 0.0;
    double se = 0.0;
};

struct SimulationSummary {
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    std::string rng_protocol;

    double mean_C = 0.0;
    double se_mean = 0.0;
    double second_moment_C = 0.0;
    double se_second_moment = 0.0;
    double variance_C = 0.0;  // sample variance of the recorded times
    double se_variance = 0.0; // delta-method standard error
    double p_alpha_first = 0.0;
    double se_p_alpha = 0.0;
    double p_beta_first = 0.0;  // exact complement of p_alpha_first
    double se_p_beta = 0.0;

    std::vector<CdfPoint> cdf;      // only when probe times were requested
    std::size_t capped_paths = 0;   // replications aborted by the event cap
};

/// Empirical distribution over levels at one time point.
struct TransitionEstimate {
    int start = 0;
    double time = 0.0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> counts;  // index = level; sums to replications

    double fraction(std::size_t level) const;
    double se(std::size_t level) const;  // binomial standard error
};

/// Competing-exponential simulation from `start` until `horizon`: at level i
/// the active clocks are birth(i), death(i) for i >= 1, alpha and beta; the
/// soonest clock wins. Catastrophe events are recorded even when they do not
/// move the chain, so paths exercise the full effectiveness semantics.
/// `max_events` bounds the work (DomainError if horizon <= 0).
Path simulate_path(const RateSchedule& schedule, const CatastropheRates& cat, int start,
                   double horizon, Xoshiro256pp& rng, std::size_t max_events = 1000000);

/// Runs `replications` independent paths, each until its first EFFECTIVE
/// catastrophe, and aggregates the stopping time and its type. Replication k
/// uses substream k of the master seed; accumulation is sequential with
/// compensated summation, so results are byte-stable. Replications that hit
/// the per-path event cap (1e6 events) are counted in capped_paths and
/// excluded from the averages. Requires alpha + beta > 0 and
/// replications >= 1000 (DomainError).
SimulationSummary estimate_first_catastrophe(const RateSchedule& schedule,
                                             const CatastropheRates& cat, int start,
                                             std::size_t replications, std::uint64_t seed,
                                             const std::vector<double>& cdf_times = {});

/// Fraction of paths at each level at time t (binomial counts; the vector of
/// counts sums to `replications` exactly).
TransitionEstimate estimate_transition(const RateSchedule& schedule, const CatastropheRates& cat,
                                       int start, double t, std::size_t replications,
                                       std::uint64_t seed);

} // namespace bdcat
