#pragma once

// Fixed benchmark parameters. Changing any of these changes every generated
// data set, so they are pinned here rather than exposed as flags.

#include <cstdint>
#include <random>

namespace roar {

// Pseudo-random engine behind every synthetic data set.
using BenchEngine = std::mt19937_64;

inline constexpr std::uint64_t kDefaultDraws = 100000;
inline constexpr int kDefaultRepetitions = 100;
// Untimed executions of each measured operation before timing starts.
inline constexpr int kWarmupRuns = 10;
inline constexpr int kSampledBitmaps = 200;

// Seed for (cell, repetition, stream) derived from the master seed:
//   s = splitmix64(splitmix64(splitmix64(master ^ cell) ^ repetition) ^ stream)
// Streams: 0 and 1 are the two generated sets, 2 picks elements to remove.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                                           std::uint64_t repetition, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(master ^ cell) ^ repetition) ^ stream);
}

// Uniform double in [0, 1) from the top 53 bits of one engine output.
inline double unit_draw(BenchEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace roar
