#pragma once

#include <map>

#include "bdcat/rates.hpp"

namespace bdcat {

/// Absorbing states of the chain that is stopped at the first effective
/// catastrophe. kAlphaAbsorbed records "an effective alpha event came first",
/// kBetaAbsorbed "an effective beta event came first".
inline constexpr int kAlphaAbsorbed = -2;
inline constexpr int kBetaAbsorbed = -1;

/// One row of a generator matrix in sparse form: `entries[n]` is the rate
/// from `level` to n (diagonal included, so conservative rows sum to zero).
struct GeneratorRow {
    int level = 0;
    std::map<int, double> entries;

    double row_sum() const;
    double at(int n) const; // 0.0 when the column is absent
};

/// Row i of the catastrophe-free birth-death generator:
/// i -> i+1 at birth(i), i -> i-1 at death(i) (i >= 1), diagonal balances.
GeneratorRow base_generator_row(const Model& model, int level);

/// Row i of the generator with catastrophes folded in. On top of the
/// birth-death moves, every level i jumps to 0 at rate alpha and to 1 at
/// rate beta; catastrophe mass landing on i itself (alpha at i = 0, beta at
/// i = 1) cancels against the diagonal, so those rows shed only the
/// fraction of catastrophe rate that actually displaces the chain.
GeneratorRow full_generator_row(const Model& model, int level);

/// Row i of the absorbed chain on {-2, -1, 0, 1, 2, ...}: the birth-death
/// part is unchanged, but effective alpha events feed the absorbing state
/// -2 and effective beta events feed -1. An alpha event is effective from
/// every level except 0; a beta event from every level except 1. Rows -2
/// and -1 are empty (absorbing).
GeneratorRow absorbed_generator_row(const Model& model, int level);

} // namespace bdcat
