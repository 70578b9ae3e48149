#pragma once

// Seeded random source with counter-derived substreams. Substream k of a
// master seed depends only on (seed, k), never on how many draws other
// streams made, so Monte Carlo loops give the same answer regardless of
// scheduling or thread count.

#include <cmath>
#include <cstdint>
#include <span>

#include "flycat/errors.hpp"

namespace flycat {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : state_(seed), seed_(seed) {}

  std::uint64_t raw() { return detail::splitmix64(state_); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal, Box-Muller. Two uniforms per draw, no cached state.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Draws an index with probability weights[i] / sum(weights).
  // Zero-weight entries are never returned, also not through rounding of
  // the running sum.
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    require(total > 0.0, "categorical: weights sum to zero");
    double u = uniform() * total;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return last_positive;
  }

  // Substream `index` of the master seed (independent of draws made here).
  RandomSource stream(std::uint64_t index) const {
    std::uint64_t s = seed_ ^ (0xd1342543de82ef95ull * (index + 1));
    detail::splitmix64(s);
    return RandomSource(s);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t state_;
  std::uint64_t seed_;
};

}  // namespace flycat
