// rng.hpp — deterministic random primitives. Distribution sampling is
// hand-rolled on top of mt19937_64 raw draws so that results do not depend on
// the standard library's (implementation-defined) distribution algorithms.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fuzzproc {

// splitmix64 finalizer; used to derive independent substreams from (seed, index).
inline std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 makeRng(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(mixSeed(seed, stream));
}

// Uniform on [0, 1) with 53-bit resolution.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniformIn(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Standard normal via Box-Muller; stateless (two raw draws per call).
inline double standardNormal(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 == 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

}  // namespace fuzzproc
