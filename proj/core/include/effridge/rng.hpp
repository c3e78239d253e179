#pragma once

// Reproducible random streams.
//
// Bits come from std::mt19937_64, whose output sequence for a given seed is
// fixed by the C++ standard. Uniform doubles take the top 53 bits of one draw.
// Normals use the Box-Muller transform on two uniforms and cache the second
// variate. Neither std::uniform_real_distribution nor std::normal_distribution
// is used, since their algorithms are implementation defined.

#include <cstdint>
#include <random>

namespace effridge {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Identifies one independent stream: an experiment-wide seed plus a trial index.
struct SeedPolicy {
  std::uint64_t base_seed = 0;
  std::uint64_t trial_index = 0;

  /// Stream seed: splitmix64(splitmix64(base_seed) ^ splitmix64(trial_index + golden)).
  std::uint64_t derived_seed() const noexcept;

  SeedPolicy with_trial(std::uint64_t trial) const noexcept { return {base_seed, trial}; }
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  explicit Rng(const SeedPolicy& policy) : Rng(policy.derived_seed()) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();

  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace effridge
