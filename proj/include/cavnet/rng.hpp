#pragma once

#include <cstdint>
#include <random>

namespace cavnet::rng {

/// SplitMix64 output function (Steele, Lea & Flood). Used as a seed mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Per-trajectory seed: the index-th output of the SplitMix64 stream started
/// at `master`. Depends only on (master, index), never on thread count or
/// scheduling, so ensembles are reproducible under any parallel split.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + index * 0x9E3779B97F4A7C15ull);
}

/// 53-bit uniform double in [0, 1).
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace cavnet::rng
