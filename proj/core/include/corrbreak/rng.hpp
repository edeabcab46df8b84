#pragma once

#include <array>
#include <cmath>
#include <cstdint>

// Deterministic random number generation for the simulation engine.
//
// All randomized results in this library are reproducible bit-for-bit from a
// single 64-bit seed, independent of platform and of how work is scheduled
// across threads. Two pieces make that work:
//
//   * stream_seed(seed, phase, index) derives an independent seed per
//     (phase, replication) pair, so replication r always sees the same draws
//     no matter which thread runs it;
//   * Xoshiro256pp + an explicit Box-Muller transform replace the standard
//     library distributions, whose output is implementation-defined.

namespace corrbreak {

// Phase tags used when deriving per-replication streams.
inline constexpr std::uint64_t kPhaseSample = 0;
inline constexpr std::uint64_t kPhaseNull = 1;
inline constexpr std::uint64_t kPhaseAlt = 2;
inline constexpr std::uint64_t kPhaseCritical = 3;

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    return mix64(state);
}

// Counter-based stream derivation: the returned seed depends on the whole
// (seed, phase, index) triple, so parallel execution order cannot change
// which draws a replication sees.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t phase,
                                 std::uint64_t index) {
    std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ (phase + 0xBF58476D1CE4E5B9ULL));
    h = mix64(h ^ (index + 0x94D049BB133111EBULL));
    return h;
}

// xoshiro256++ (Blackman, Vigna 2019), seeded through SplitMix64.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second variate of each pair is
    // cached so draws stay aligned with the underlying uniform stream.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace corrbreak
