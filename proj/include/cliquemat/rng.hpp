#pragma once

#include <cstdint>
#include <random>

namespace cliquemat {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seed of the `stream`-th independent substream of `seed`. Restarts,
/// replications and epochs each take their own stream index, so any one of
/// them can be reproduced without replaying the others.
constexpr std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ull));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(split_seed(seed, stream));
}

}  // namespace cliquemat
