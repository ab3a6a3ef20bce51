#pragma once

#include <cstdint>
#include <random>

namespace gossipdet {

/// Random engine used throughout. One engine instance per trajectory or
/// graph sample; never shared across workers.
using Rng = std::mt19937_64;

/// splitmix64 finalizer. Bijective on 64-bit integers.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed of an independent stream. For a fixed master seed, distinct stream
/// indices give distinct seeds (odd multiplier and mix64 are both bijections).
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream) noexcept {
    return mix64(master_seed + 0x9e3779b97f4a7c15ull * (stream + 1));
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

/// Uniform draw from [0, 1).
inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace gossipdet
