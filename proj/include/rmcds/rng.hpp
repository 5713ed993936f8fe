#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rmcds {

/// One SplitMix64 step. Used for seed derivation, not for sampling.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Substream derivation rule: the seed of substream `index` under a master
/// seed is two SplitMix64 steps over master XOR (0xD1B54A32D192ED03 * (index+1)).
/// Independent substreams make parallel trials schedule-independent.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0xD1B54A32D192ED03ull * (index + 1));
  splitmix64_next(s);
  return splitmix64_next(s);
}

/// Deterministic scalar sampler. Raw 64-bit output comes from std::mt19937_64,
/// whose stream is pinned by the standard; the scalar transforms are done here
/// so results do not depend on library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform on {-1, +1}.
  double rademacher() { return (gen_() & 1ull) ? 1.0 : -1.0; }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace rmcds
