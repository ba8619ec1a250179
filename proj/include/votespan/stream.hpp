#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace votespan {

/// Radial-basis synthetic stream: per class a fixed set of centroids in the
/// unit hypercube, instances are a uniformly chosen centroid plus isotropic
/// Gaussian noise.
struct RbfConfig {
  int num_classes = 2;
  int num_features = 20;
  int centroids_per_class = 5;
  double noise_std = 0.05;
  long long instances = 1000;
  std::uint64_t seed = 1;
};

inline void validate_rbf_config(const RbfConfig& cfg) {
  if (cfg.num_classes < 2) throw DomainError("rbf stream: need at least 2 classes");
  if (cfg.num_features < 1) throw DomainError("rbf stream: need at least 1 feature");
  if (cfg.centroids_per_class < 1) throw DomainError("rbf stream: need at least 1 centroid per class");
  if (cfg.instances < 1) throw DomainError("rbf stream: need at least 1 instance");
  if (!(cfg.noise_std >= 0.0)) throw DomainError("rbf stream: noise_std must be nonnegative");
}

class RbfStream {
 public:
  explicit RbfStream(const RbfConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    validate_rbf_config(cfg);
    centroids_.resize(static_cast<std::size_t>(cfg.num_classes) *
                      static_cast<std::size_t>(cfg.centroids_per_class));
    for (auto& centroid : centroids_) {
      centroid.resize(static_cast<std::size_t>(cfg.num_features));
      for (auto& x : centroid) x = rng_.next_double();
    }
  }

  StreamInstance next() {
    StreamInstance inst;
    inst.label = static_cast<int>(rng_.below(static_cast<std::uint64_t>(cfg_.num_classes)));
    const std::size_t c = static_cast<std::size_t>(inst.label) *
                              static_cast<std::size_t>(cfg_.centroids_per_class) +
                          rng_.below(static_cast<std::uint64_t>(cfg_.centroids_per_class));
    inst.features.resize(static_cast<std::size_t>(cfg_.num_features));
    for (std::size_t f = 0; f < inst.features.size(); ++f) {
      inst.features[f] = centroids_[c][f];
      if (cfg_.noise_std > 0.0) inst.features[f] += cfg_.noise_std * rng_.gaussian();
    }
    return inst;
  }

  const RbfConfig& config() const { return cfg_; }

 private:
  RbfConfig cfg_;
  Rng rng_;
  std::vector<std::vector<double>> centroids_;
};

inline std::vector<StreamInstance> rbf_stream(const RbfConfig& cfg) {
  RbfStream gen(cfg);
  std::vector<StreamInstance> out;
  out.reserve(static_cast<std::size_t>(cfg.instances));
  for (long long i = 0; i < cfg.instances; ++i) out.push_back(gen.next());
  return out;
}

/// Vote-matrix generator with a planted dependence profile: while the span of
/// an instance's votes has dimension d, each new vote is dependent with
/// probability p_d (a convex combination of the earlier span-growing votes)
/// and otherwise adds a fresh direction.
struct PlantedVoteConfig {
  DependenceProfile profile;
  int votes_per_instance = 1;
  int num_classes = 2;
  long long instances = 1000;
  std::uint64_t seed = 1;
};

inline void validate_planted_config(const PlantedVoteConfig& cfg) {
  validate_profile(cfg.profile, cfg.num_classes);
  if (cfg.votes_per_instance < 1) throw DomainError("planted votes: need at least 1 vote per instance");
  if (cfg.instances < 1) throw DomainError("planted votes: need at least 1 instance");
}

class PlantedVoteStream {
 public:
  explicit PlantedVoteStream(const PlantedVoteConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    validate_planted_config(cfg);
  }

  VoteMatrix next() {
    const std::size_t m = static_cast<std::size_t>(cfg_.num_classes);
    const std::size_t n = static_cast<std::size_t>(cfg_.votes_per_instance);
    VoteMatrix out;
    out.instance_id = emitted_++;
    out.rows.reserve(n);

    std::vector<std::vector<double>> span_votes;  // the votes that grew the span
    std::vector<std::vector<double>> ortho;       // orthonormal frame of that span

    std::vector<double> first = rng_.simplex_point(m);
    push_direction(ortho, first);
    span_votes.push_back(first);
    out.rows.push_back(VoteVector{std::move(first)});
    std::size_t dim = 1;

    for (std::size_t v = 1; v < n; ++v) {
      const bool dependent = dim >= m || rng_.next_double() < cfg_.profile.p[dim - 1];
      std::vector<double> vote;
      if (dependent) {
        vote = convex_combination(span_votes);
      } else {
        vote = independent_vote(span_votes, ortho);
        push_direction(ortho, vote);
        span_votes.push_back(vote);
        ++dim;
      }
      out.rows.push_back(VoteVector{std::move(vote)});
    }
    return out;
  }

  const PlantedVoteConfig& config() const { return cfg_; }

 private:
  std::vector<double> convex_combination(const std::vector<std::vector<double>>& span_votes) {
    const std::vector<double> coeffs = rng_.simplex_point(span_votes.size());
    std::vector<double> vote(span_votes.front().size(), 0.0);
    for (std::size_t k = 0; k < span_votes.size(); ++k)
      for (std::size_t j = 0; j < vote.size(); ++j) vote[j] += coeffs[k] * span_votes[k][j];
    return vote;
  }

  /// Base point inside the span plus a sum-zero direction with a guaranteed
  /// component outside it, so the new vote still sums to 1 but grows the span
  /// by a margin far above the rank tolerance.
  std::vector<double> independent_vote(const std::vector<std::vector<double>>& span_votes,
                                       const std::vector<std::vector<double>>& ortho) {
    const std::size_t m = static_cast<std::size_t>(cfg_.num_classes);
    std::vector<double> base = convex_combination(span_votes);
    std::vector<double> dir(m);
    double dir_norm = 0.0;
    for (int attempt = 0; attempt < 256; ++attempt) {
      double mean = 0.0;
      for (auto& x : dir) {
        x = rng_.gaussian();
        mean += x;
      }
      mean /= static_cast<double>(m);
      for (auto& x : dir) x -= mean;  // sum-zero, so the vote total stays 1
      dir_norm = detail::norm2(dir);
      if (dir_norm < 1e-12) continue;
      std::vector<double> residual = dir;
      detail::subtract_projection(residual, ortho);
      if (detail::norm2(residual) >= 0.1 * dir_norm) break;
    }
    const double scale = (0.1 + 0.4 * rng_.next_double()) / dir_norm;
    for (std::size_t j = 0; j < m; ++j) base[j] += scale * dir[j];
    return base;
  }

  static void push_direction(std::vector<std::vector<double>>& ortho,
                             const std::vector<double>& vote) {
    std::vector<double> residual = vote;
    detail::subtract_projection(residual, ortho);
    const double nrm = detail::norm2(residual);
    for (auto& x : residual) x /= nrm;
    ortho.push_back(std::move(residual));
  }

  PlantedVoteConfig cfg_;
  Rng rng_;
  std::int64_t emitted_ = 0;
};

inline std::vector<VoteMatrix> synthetic_vote_stream(const PlantedVoteConfig& cfg) {
  PlantedVoteStream gen(cfg);
  std::vector<VoteMatrix> out;
  out.reserve(static_cast<std::size_t>(cfg.instances));
  for (long long i = 0; i < cfg.instances; ++i) out.push_back(gen.next());
  return out;
}

}  // namespace votespan
