#pragma once

#include <cstddef>

namespace bdcat {

/// Controls the finite state-space approximation of infinite linear systems.
/// Truncation keeps levels 0..N with the outflow to N+1 simply dropped
/// (killed boundary), which bounds every resolvent quantity from below and
/// makes the approximation monotone in N.
struct TruncationPolicy {
    std::size_t initial_level = 64;   // first N tried
    std::size_t growth_factor = 2;    // N multiplies by this per retry
    double rel_tol = 1e-10;           // convergence threshold on probe entries
    std::size_t max_level = 1u << 20; // hard cap; exceeding it is an error

    void validate() const; // throws ConfigError on nonsense settings
};

} // namespace bdcat
