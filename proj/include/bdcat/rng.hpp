#pragma once

#include <cmath>
#include <cstdint>

namespace bdcat {

/// Stream protocol identifier stored in simulation summaries. Bump it if the
/// generator, the seeding scheme, or the variate recipes ever change, so old
/// recorded seeds are not silently replayed under different semantics.
inline constexpr const char* kRngProtocol = "bdcat-rng-1";

/// SplitMix64 step; used only to expand seeds into generator state.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

/// xoshiro256++ with explicit, platform-independent variate recipes. The
/// standard-library distributions are deliberately avoided: their streams
/// differ across implementations, and the determinism contract here is
/// byte-for-byte.
class Xoshiro256pp {
public:
    /// Expands a 64-bit seed into full state via SplitMix64 (all-zero state
    /// is unreachable this way).
    static Xoshiro256pp seeded(std::uint64_t seed) {
        SplitMix64 sm(seed);
        Xoshiro256pp g;
        for (auto& w : g.s_) w = sm.next();
        return g;
    }

    /// Substream k of a master seed; replications use k = 0, 1, 2, ...
    /// so any replication can be reproduced in isolation.
    static Xoshiro256pp substream(std::uint64_t master_seed, std::uint64_t k) {
        return seeded(master_seed + (k + 1) * 0x9E3779B97F4A7C15ULL);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 significant bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Exponential variate with the given rate (rate > 0).
    double exponential(double rate) {
        // uniform01() < 1 strictly, so the argument of log1p stays in (-1, 0].
        return -std::log1p(-uniform01()) / rate;
    }

private:
    std::uint64_t s_[4] = {};

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
};

} // namespace bdcat
