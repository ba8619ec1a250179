#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace votespan {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable mapping (base seed, stream id) -> independent seed. Used to hand
/// out per-learner / per-partition / per-size streams from one user seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base;
  splitmix64(s);
  s ^= 0x9e3779b97f4a7c15ULL * (stream + 1);
  splitmix64(s);
  return splitmix64(s);
}

/// xoshiro256++ with hand-rolled distributions. Everything downstream of a
/// seed is a pure function of that seed, on every platform; std::*_distribution
/// is avoided because its output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), unbiased by rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw DomainError("Rng::below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Standard normal via Box-Muller (one value per call).
  double gaussian() {
    double u1 = next_double();
    if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Poisson draw; Knuth's product method for small means, normal tail otherwise.
  long long poisson(double mean) {
    if (mean < 0) throw DomainError("Rng::poisson: mean must be nonnegative");
    if (mean == 0) return 0;
    if (mean > 50.0) {
      const double approx = mean + std::sqrt(mean) * gaussian();
      return approx < 0 ? 0 : static_cast<long long>(std::llround(approx));
    }
    const double limit = std::exp(-mean);
    long long k = 0;
    double product = 1.0;
    do {
      ++k;
      product *= next_double();
    } while (product > limit);
    return k - 1;
  }

  /// Uniform point on the probability simplex (Dirichlet(1,...,1)).
  std::vector<double> simplex_point(std::size_t k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& wi : w) {
      double u = next_double();
      if (u < 0x1.0p-53) u = 0x1.0p-53;
      wi = -std::log(u);
      total += wi;
    }
    for (auto& wi : w) wi /= total;
    return w;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

}  // namespace votespan
