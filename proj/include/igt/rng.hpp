#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "igt/types.hpp"

namespace igt {

/// Seeded counter-based random stream (splitmix64 core). Identical seed and
/// call sequence give identical draws on every platform; substream() derives
/// independent streams so parallel benchmark instances never share state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard exponential via inversion.
  double exponential() { return -std::log1p(-uniform()); }

  /// Standard normal (Box-Muller, no cached spare so streams stay countable).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Index draw from an (unnormalized is rejected) probability vector.
  int categorical(const Vec& probs) {
    const double u = uniform();
    double acc = 0.0;
    for (Index k = 0; k < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) return static_cast<int>(k);
    }
    if (acc < 1.0 - 1e-9)
      throw std::invalid_argument("categorical: probabilities sum to " + std::to_string(acc));
    return static_cast<int>(probs.size() - 1);
  }

  /// Independent stream derived from (seed, idx); any idx, any depth.
  Rng substream(std::uint64_t idx) const {
    std::uint64_t z = seed_ ^ (0xD1B54A32D192ED03ULL * (idx + 1));
    z = (z ^ (z >> 29)) * 0xFF51AFD7ED558CCDULL;
    z = (z ^ (z >> 32)) * 0xC4CEB9FE1A85EC53ULL;
    return Rng(z ^ (z >> 32));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace igt
