#include "bdcat/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdcat/errors.hpp"

namespace bdcat {

namespace {

constexpr std::size_t kPathEventCap = 1000000;

void require_start(int start) {
    if (start < 0) {
        throw DomainError("start level must be nonnegative");
    }
}

// Compensated (Neumaier) accumulator; the replication loop adds terms in a
// fixed order, so totals are bit-stable for a given seed.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct EventPick {
    PathEvent::Kind kind;
    int state_after;
    bool effective;
};

// One competing-exponential step from `level`; draws exactly two variates
// (waiting time, event pick) regardless of the outcome.
EventPick pick_event(const RateSchedule& schedule, const CatastropheRates& cat, int level,
                     Xoshiro256pp& rng, double& waiting_time) {
    const double birth = schedule.birth(level);
    const double death = level >= 1 ? schedule.death(level) : 0.0;
    const double total = birth + death + cat.alpha + cat.beta;
    waiting_time = rng.exponential(total);
    const double u = rng.uniform01() * total;
    if (u < birth) {
        return {PathEvent::Kind::Birth, level + 1, true};
    }
    if (u < birth + death) {
        return {PathEvent::Kind::Death, level - 1, true};
    }
    if (u < birth + death + cat.alpha) {
        return {PathEvent::Kind::AlphaCatastrophe, 0, level >= 1};
    }
    return {PathEvent::Kind::BetaCatastrophe, 1, level != 1};
}

}  // namespace

Path simulate_path(const RateSchedule& schedule, const CatastropheRates& cat, int start,
                   double horizon, Xoshiro256pp& rng, std::size_t max_events) {
    require_start(start);
    if (!std::isfinite(horizon) || horizon <= 0.0) {
        std::ostringstream msg;
        msg << "simulation horizon must be positive and finite, got " << horizon;
        throw DomainError(msg.str());
    }
    Path path;
    path.start = start;
    int level = start;
    double clock = 0.0;
    while (path.events.size() < max_events) {
        double wait = 0.0;
        const EventPick pick = pick_event(schedule, cat, level, rng, wait);
        clock += wait;
        if (clock > horizon) {
            break;
        }
        PathEvent event;
        event.time = clock;
        event.kind = pick.kind;
        event.state_before = level;
        event.state_after = pick.state_after;
        event.effective = pick.effective;
        path.events.push_back(event);
        level = pick.state_after;
    }
    return path;
}

SimulationSummary estimate_first_catastrophe(const RateSchedule& schedule,
                                             const CatastropheRates& cat, int start,
                                             std::size_t replications, std::uint64_t seed,
                                             const std::vector<double>& cdf_times) {
    require_start(start);
    if (!(cat.total() > 0.0)) {
        throw DomainError("first-catastrophe simulation needs alpha + beta > 0");
    }
    if (replications < 1000) {
        std::ostringstream msg;
        msg << "at least 1000 replications required for stable standard errors, got "
            << replications;
        throw DomainError(msg.str());
    }

    CompensatedSum s1, s2, s3, s4;
    std::size_t alpha_first = 0;
    std::size_t capped = 0;
    std::vector<std::size_t> cdf_hits(cdf_times.size(), 0);

    for (std::size_t rep = 0; rep < replications; ++rep) {
        Xoshiro256pp rng = Xoshiro256pp::substream(seed, rep);
        int level = start;
        double clock = 0.0;
        bool was_alpha = false;
        bool done = false;
        for (std::size_t events = 0; events < kPathEventCap; ++events) {
            double wait = 0.0;
            const EventPick pick = pick_event(schedule, cat, level, rng, wait);
            clock += wait;
            if (pick.effective && (pick.kind == PathEvent::Kind::AlphaCatastrophe ||
                                   pick.kind == PathEvent::Kind::BetaCatastrophe)) {
                was_alpha = pick.kind == PathEvent::Kind::AlphaCatastrophe;
                done = true;
                break;
            }
            level = pick.state_after;
        }
        if (!done) {
            ++capped;
            continue;
        }
        const double t = clock;
        s1.add(t);
        s2.add(t * t);
        s3.add(t * t * t);
        s4.add(t * t * t * t);
        if (was_alpha) {
            ++alpha_first;
        }
        for (std::size_t i = 0; i < cdf_times.size(); ++i) {
            if (t <= cdf_times[i]) {
                ++cdf_hits[i];
            }
        }
    }

    const std::size_t used = replications - capped;
    if (used < 2) {
        throw NumericError("all replications hit the event cap; no usable sample");
    }
    const double n = static_cast<double>(used);
    const double mean = s1.value() / n;
    const double raw2 = s2.value() / n;
    const double raw3 = s3.value() / n;
    const double raw4 = s4.value() / n;

    const double sample_var = std::max(0.0, (s2.value() - n * mean * mean) / (n - 1.0));
    const double var_of_t2 = std::max(0.0, (s4.value() - n * raw2 * raw2) / (n - 1.0));
    // Fourth central moment from the raw power sums; with times of order one
    // and 1e5 replications the cancellation here is harmless.
    const double central4 = raw4 - 4.0 * mean * raw3 + 6.0 * mean * mean * raw2 -
                            3.0 * mean * mean * mean * mean;
    const double var_of_var = std::max(0.0, (central4 - sample_var * sample_var) / n);

    SimulationSummary out;
    out.replications = replications;
    out.seed = seed;
    out.rng_protocol = kRngProtocol;
    out.mean_C = mean;
    out.se_mean = std::sqrt(sample_var / n);
    out.second_moment_C = raw2;
    out.se_second_moment = std::sqrt(var_of_t2 / n);
    out.variance_C = sample_var;
    out.se_variance = std::sqrt(var_of_var);
    const double p_alpha = static_cast<double>(alpha_first) / n;
    out.p_alpha_first = p_alpha;
    out.p_beta_first = static_cast<double>(used - alpha_first) / n;
    out.se_p_alpha = std::sqrt(p_alpha * (1.0 - p_alpha) / n);
    out.se_p_beta = out.se_p_alpha;
    out.capped_paths = capped;
    out.cdf.reserve(cdf_times.size());
    for (std::size_t i = 0; i < cdf_times.size(); ++i) {
        CdfPoint point;
        point.time = cdf_times[i];
        point.fraction = static_cast<double>(cdf_hits[i]) / n;
        point.se = std::sqrt(point.fraction * (1.0 - point.fraction) / n);
        out.cdf.push_back(point);
    }
    return out;
}

double TransitionEstimate::fraction(std::size_t level) const {
    if (level >= counts.size() || replications == 0) {
        return 0.0;
    }
    return static_cast<double>(counts[level]) / static_cast<double>(replications);
}

double TransitionEstimate::se(std::size_t level) const {
    if (replications == 0) {
        return 0.0;
    }
    const double p = fraction(level);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(replications));
}

TransitionEstimate estimate_transition(const RateSchedule& schedule, const CatastropheRates& cat,
                                       int start, double t, std::size_t replications,
                                       std::uint64_t seed) {
    require_start(start);
    if (!std::isfinite(t) || t < 0.0) {
        std::ostringstream msg;
        msg << "observation time must be nonnegative and finite, got " << t;
        throw DomainError(msg.str());
    }
    if (replications < 1000) {
        std::ostringstream msg;
        msg << "at least 1000 replications required for stable standard errors, got "
            << replications;
        throw DomainError(msg.str());
    }

    TransitionEstimate out;
    out.start = start;
    out.time = t;
    out.replications = replications;
    out.seed = seed;
    for (std::size_t rep = 0; rep < replications; ++rep) {
        Xoshiro256pp rng = Xoshiro256pp::substream(seed, rep);
        int level = start;
        double clock = 0.0;
        for (std::size_t events = 0; events < kPathEventCap; ++events) {
            double wait = 0.0;
            const EventPick pick = pick_event(schedule, cat, level, rng, wait);
            if (clock + wait > t) {
                break;
            }
            clock += wait;
            level = pick.state_after;
        }
        const std::size_t slot = static_cast<std::size_t>(level);
        if (slot >= out.counts.size()) {
            out.counts.resize(slot + 1, 0);
        }
        ++out.counts[slot];
    }
    return out;
}

}  // namespace bdcat
