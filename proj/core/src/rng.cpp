#include "effridge/rng.hpp"

#include <cmath>
#include <numbers>

namespace effridge {

std::uint64_t SeedPolicy::derived_seed() const noexcept {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(trial_index + 0x9E3779B97F4A7C15ULL));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  // 1 - u lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

}  // namespace effridge
