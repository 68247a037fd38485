#pragma once

// Internal helpers shared by the resolvent and catastrophe layers: assembly
// of the transposed killed-truncation systems whose solutions are resolvent
// rows. Not part of the public API.

#include <cstddef>
#include <vector>

#include "bdcat/rates.hpp"
#include "bdcat/tridiagonal.hpp"

namespace bdcat::detail {

struct TridiagonalSystem {
    std::vector<Complex> lower;  // lower[i] sits in row i+1
    std::vector<Complex> diag;
    std::vector<Complex> upper;  // upper[i] sits in row i
};

/// Transposed system for one resolvent row of a killed truncation on levels
/// 0..level. Row n couples targets n-1, n, n+1 with coefficients
/// -birth(n-1), shift + exit_rate(n) + diag_add(n), -death(n+1); the killed
/// boundary keeps the full exit rate at the last row and simply has no
/// upper coupling there. diag_add supplies per-level diagonal additions
/// (zero for the catastrophe-free chain).
template <typename DiagAdd>
TridiagonalSystem transposed_killed_system(const RateSchedule& schedule, Complex shift,
                                           std::size_t level, DiagAdd&& diag_add) {
    TridiagonalSystem t;
    const std::size_t n = level + 1;
    t.diag.resize(n);
    t.lower.resize(n - 1);
    t.upper.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto li = static_cast<long long>(i);
        t.diag[i] = shift + schedule.exit_rate(li) + diag_add(li);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto li = static_cast<long long>(i);
        t.lower[i] = -schedule.birth(li);
        t.upper[i] = -schedule.death(li + 1);
    }
    return t;
}

inline TridiagonalSystem transposed_killed_system(const RateSchedule& schedule, Complex shift,
                                                  std::size_t level) {
    return transposed_killed_system(schedule, shift, level, [](long long) { return 0.0; });
}

/// Unit vector e_index of the given size.
std::vector<Complex> unit_rhs(std::size_t size, std::size_t index);

/// Sup-norm defect of a solution of the transposed system against its
/// defining equations on rows 0..level-1 (the last row carries the
/// truncation defect by construction and is excluded).
double interior_residual(const TridiagonalSystem& t, const std::vector<Complex>& x,
                         const std::vector<Complex>& rhs);

/// Largest relative change between two refinements over the probe window
/// [0, probe_hi] (both vectors must cover it).
double probe_gap(const std::vector<Complex>& coarse, const std::vector<Complex>& fine,
                 std::size_t probe_hi);

} // namespace bdcat::detail
