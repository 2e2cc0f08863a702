#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random number generation.
//
// Every draw is a pure function of (seed, counter), so fields of random
// numbers can be produced in any order, from any number of threads, and
// still be bitwise identical across platforms. The mixer is the SplitMix64
// finalizer (Steele, Lea, Flood 2014): the counter is spread by the golden
// ratio increment and then run through two xor-shift-multiply rounds.

namespace eigenseg::rng {

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform double in the open interval (0,1). The +0.5 offset keeps both
/// endpoints out, so the value is always safe under log().
inline double unit_open(std::uint64_t seed, std::uint64_t counter) {
    return (static_cast<double>(mix(seed, counter) >> 11) + 0.5) * 0x1p-53;
}

/// Standard normal deviate via Box-Muller on counters (2i, 2i+1).
inline double gaussian(std::uint64_t seed, std::uint64_t counter) {
    const double u1 = unit_open(seed, 2 * counter);
    const double u2 = unit_open(seed, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace eigenseg::rng
