#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace hiplan {

// All stochastic code in this library draws through these helpers instead of
// <random> distributions, so a given seed replays the same numbers on every
// standard library implementation.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable per-(seed, epoch, episode) stream derivation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ b);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Uniform in [0, 1).
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Box-Muller, stateless: consumes exactly two engine outputs per draw.
inline double normal01(Rng& rng) {
    // u1 in (0, 1] so the log is finite.
    double u1 = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Index sample from an explicit probability vector (assumed normalized).
inline std::size_t sample_index(Rng& rng, const std::vector<double>& probs) {
    double u = uniform01(rng);
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) last_positive = i;
        u -= probs[i];
        if (u <= 0.0 && probs[i] > 0.0) return i;
    }
    return last_positive;
}

}  // namespace hiplan
