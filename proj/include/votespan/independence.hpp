#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace votespan {

/// dist[d-1] = probability that the span of the votes seen so far has
/// dimension d. The chain starts at dimension 1 after the first vote; each
/// later vote keeps dimension d with probability p_d and increments it with
/// probability 1 - p_d; dimension m is absorbing.
struct DimensionChainState {
  std::vector<double> dist;
};

namespace detail {

inline void check_chain_args(long long n, int m, const DependenceProfile& profile) {
  validate_profile(profile, m);
  if (n < 1) throw DomainError("vote count n must be at least 1");
}

}  // namespace detail

/// Distribution of the span dimension after n votes (forward dynamics on the
/// dimension chain, O(n*m) time).
inline DimensionChainState chain_distribution(long long n, int m,
                                              const DependenceProfile& profile) {
  detail::check_chain_args(n, m, profile);
  std::vector<double> dist(static_cast<std::size_t>(m), 0.0);
  dist[0] = 1.0;  // the first vote always spans one dimension
  const auto& p = profile.p;
  for (long long vote = 2; vote <= n; ++vote) {
    dist[static_cast<std::size_t>(m - 1)] += dist[static_cast<std::size_t>(m - 2)] * (1.0 - p[static_cast<std::size_t>(m - 2)]);
    for (int d = m - 1; d >= 2; --d) {
      dist[static_cast<std::size_t>(d - 1)] =
          dist[static_cast<std::size_t>(d - 1)] * p[static_cast<std::size_t>(d - 1)] +
          dist[static_cast<std::size_t>(d - 2)] * (1.0 - p[static_cast<std::size_t>(d - 2)]);
    }
    dist[0] *= p[0];
  }
  return DimensionChainState{std::move(dist)};
}

/// Probability that n votes contain m linearly independent ones. 0 when n < m.
inline double reach_probability(long long n, int m, const DependenceProfile& profile) {
  detail::check_chain_args(n, m, profile);
  if (n < m) return 0.0;
  return chain_distribution(n, m, profile).dist[static_cast<std::size_t>(m - 1)];
}

namespace detail {

/// Complete homogeneous symmetric polynomial h_k(p) by direct enumeration of
/// exponent tuples x_1 + ... + x_q = k.
inline double homogeneous_sum(const std::vector<double>& p, std::size_t var, long long remaining) {
  if (var + 1 == p.size()) return std::pow(p[var], static_cast<double>(remaining));
  double total = 0.0;
  double factor = 1.0;
  for (long long x = 0; x <= remaining; ++x) {
    total += factor * homogeneous_sum(p, var + 1, remaining - x);
    factor *= p[var];
  }
  return total;
}

}  // namespace detail

/// Literal evaluation of the independence probability as
/// prod(1-p_i) * sum_{k=0}^{n-m} h_k(p). Exponential in m and n - m; guarded
/// so it stays a desk-scale oracle.
inline double reach_probability_bruteforce(long long n, int m, const DependenceProfile& profile) {
  detail::check_chain_args(n, m, profile);
  if (m > 6) throw CapacityError("reach_probability_bruteforce: m must be at most 6");
  if (n - m > 12) throw CapacityError("reach_probability_bruteforce: n - m must be at most 12");
  if (n < m) return 0.0;
  double prefactor = 1.0;
  for (double pk : profile.p) prefactor *= (1.0 - pk);
  double series = 0.0;
  for (long long k = 0; k <= n - m; ++k) series += detail::homogeneous_sum(profile.p, 0, k);
  return prefactor * series;
}

/// Smallest ensemble size whose independence probability meets the target,
/// or unreachable (any p_k = 1, or the search cap is exhausted).
struct SizeRecommendation {
  std::optional<long long> n_min;
  double target = 0.0;
  double achieved = 0.0;  // probability at n_min, or at the cap when unreachable

  bool unreachable() const { return !n_min.has_value(); }
};

inline SizeRecommendation min_ensemble_size(int m, const DependenceProfile& profile,
                                            double target, long long cap = 1'000'000) {
  validate_profile(profile, m);
  if (!(target > 0.0 && target < 1.0))
    throw DomainError("min_ensemble_size: target must lie in (0, 1)");
  for (double pk : profile.p) {
    if (pk == 1.0) return SizeRecommendation{std::nullopt, target, 0.0};
  }
  // Incremental chain walk; the probability is nondecreasing in n, so the
  // first crossing is the answer.
  std::vector<double> dist(static_cast<std::size_t>(m), 0.0);
  dist[0] = 1.0;
  const auto& p = profile.p;
  double reached = 0.0;
  for (long long n = 1; n <= cap; ++n) {
    if (n >= 2) {
      dist[static_cast<std::size_t>(m - 1)] += dist[static_cast<std::size_t>(m - 2)] * (1.0 - p[static_cast<std::size_t>(m - 2)]);
      for (int d = m - 1; d >= 2; --d) {
        dist[static_cast<std::size_t>(d - 1)] =
            dist[static_cast<std::size_t>(d - 1)] * p[static_cast<std::size_t>(d - 1)] +
            dist[static_cast<std::size_t>(d - 2)] * (1.0 - p[static_cast<std::size_t>(d - 2)]);
      }
      dist[0] *= p[0];
    }
    reached = dist[static_cast<std::size_t>(m - 1)];
    if (reached >= target) return SizeRecommendation{n, target, reached};
  }
  return SizeRecommendation{std::nullopt, target, reached};
}

/// Monte Carlo walk of the dimension chain: fraction of trials whose span
/// reaches dimension m within n votes. Deterministic for a fixed seed.
inline double simulate_chain(long long n, int m, const DependenceProfile& profile,
                             long long trials, std::uint64_t seed) {
  detail::check_chain_args(n, m, profile);
  if (trials < 1) throw DomainError("simulate_chain: trials must be at least 1");
  Rng rng(seed);
  const auto& p = profile.p;
  long long hits = 0;
  for (long long t = 0; t < trials; ++t) {
    int d = 1;
    for (long long vote = 2; vote <= n && d < m; ++vote) {
      if (rng.next_double() >= p[static_cast<std::size_t>(d - 1)]) ++d;
    }
    if (d == m) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

/// Same walk split across worker partitions with derived per-partition seeds;
/// exact hit counts are merged, so the result depends only on
/// (seed, partitions), not on scheduling.
inline double simulate_chain_partitioned(long long n, int m, const DependenceProfile& profile,
                                         long long trials, std::uint64_t seed, int partitions) {
  if (partitions < 1) throw DomainError("simulate_chain_partitioned: partitions must be >= 1");
  if (partitions == 1) return simulate_chain(n, m, profile, trials, seed);
  detail::check_chain_args(n, m, profile);
  if (trials < 1) throw DomainError("simulate_chain_partitioned: trials must be at least 1");

  const int parts = static_cast<int>(std::min<long long>(partitions, trials));
  std::vector<long long> share(static_cast<std::size_t>(parts), trials / parts);
  for (long long r = 0; r < trials % parts; ++r) ++share[static_cast<std::size_t>(r)];

  std::vector<long long> hits(static_cast<std::size_t>(parts), 0);
  {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(parts));
    for (int w = 0; w < parts; ++w) {
      workers.emplace_back([&, w] {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(w)));
        const auto& p = profile.p;
        long long local = 0;
        for (long long t = 0; t < share[static_cast<std::size_t>(w)]; ++t) {
          int d = 1;
          for (long long vote = 2; vote <= n && d < m; ++vote) {
            if (rng.next_double() >= p[static_cast<std::size_t>(d - 1)]) ++d;
          }
          if (d == m) ++local;
        }
        hits[static_cast<std::size_t>(w)] = local;
      });
    }
    for (auto& t : workers) t.join();
  }
  long long total = 0;
  for (long long h : hits) total += h;
  return static_cast<double>(total) / static_cast<double>(trials);
}

}  // namespace votespan
