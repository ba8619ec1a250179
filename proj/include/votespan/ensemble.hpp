#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace votespan {

struct EnsembleConfig {
  int n = 8;                      // component classifier count
  int window = 500;               // instances between weight refreshes
  double ridge = 1e-6;            // stabilizes near-singular windows
  double bagging_rate = 1.0;      // Poisson mean for per-instance replication
  double feature_fraction = 0.5;  // share of features each learner sees
  std::uint64_t seed = 1;
};

inline void validate_ensemble_config(const EnsembleConfig& cfg) {
  if (cfg.n < 1) throw DomainError("ensemble: need at least 1 classifier");
  if (cfg.window < 1) throw DomainError("ensemble: window must be at least 1");
  if (cfg.ridge < 0) throw DomainError("ensemble: ridge must be nonnegative");
  if (!(cfg.bagging_rate > 0)) throw DomainError("ensemble: bagging_rate must be positive");
  if (!(cfg.feature_fraction > 0 && cfg.feature_fraction <= 1))
    throw DomainError("ensemble: feature_fraction must lie in (0, 1]");
}

/// Incremental Gaussian naive model over a random feature subset, diversified
/// by Poisson online bagging. Stands in for a heavyweight stream learner; the
/// ensemble layer only needs votes that sum to 1.
class OnlineGaussianLearner {
 public:
  OnlineGaussianLearner(int num_classes, int num_features, double feature_fraction,
                        double bagging_rate, std::uint64_t seed)
      : num_features_(num_features), bagging_rate_(bagging_rate), rng_(seed) {
    if (num_classes < 2) throw DomainError("learner: need at least 2 classes");
    if (num_features < 1) throw DomainError("learner: need at least 1 feature");
    classes_.resize(static_cast<std::size_t>(num_classes));
    const int subset = std::max(
        1, static_cast<int>(std::ceil(feature_fraction * num_features - 1e-12)));
    // partial Fisher-Yates draw of `subset` distinct feature indices
    std::vector<int> all(static_cast<std::size_t>(num_features));
    std::iota(all.begin(), all.end(), 0);
    for (int k = 0; k < subset; ++k) {
      const std::size_t pick =
          static_cast<std::size_t>(k) +
          rng_.below(static_cast<std::uint64_t>(num_features - k));
      std::swap(all[static_cast<std::size_t>(k)], all[pick]);
    }
    features_.assign(all.begin(), all.begin() + subset);
    std::sort(features_.begin(), features_.end());
  }

  /// Posterior-like scores normalized to sum 1. Uniform before any training;
  /// classes never seen get score 0.
  VoteVector predict(std::span<const double> features) const {
    if (features.size() != static_cast<std::size_t>(num_features_))
      throw ShapeError("learner: feature length mismatch");
    const std::size_t m = classes_.size();
    VoteVector vote;
    vote.scores.assign(m, 1.0 / static_cast<double>(m));
    if (total_count_ == 0) return vote;

    std::vector<double> logp(m, -std::numeric_limits<double>::infinity());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m; ++c) {
      const ClassStats& stats = classes_[c];
      if (stats.count == 0) continue;
      double lp = std::log(static_cast<double>(stats.count) / static_cast<double>(total_count_));
      for (std::size_t k = 0; k < features_.size(); ++k) {
        const double x = features[static_cast<std::size_t>(features_[k])];
        const double var = std::max(stats.m2[k] / static_cast<double>(stats.count), kVarianceFloor);
        const double diff = x - stats.mean[k];
        lp += -0.5 * (diff * diff / var + std::log(2.0 * 3.14159265358979323846 * var));
      }
      logp[c] = lp;
      best = std::max(best, lp);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      vote.scores[c] = std::isfinite(logp[c]) ? std::exp(logp[c] - best) : 0.0;
      sum += vote.scores[c];
    }
    for (auto& s : vote.scores) s /= sum;
    return vote;
  }

  /// Trains with a Poisson(bagging_rate) multiplicity; returns it.
  int train(std::span<const double> features, int label) {
    const int multiplicity = static_cast<int>(rng_.poisson(bagging_rate_));
    train_weighted(features, label, multiplicity);
    return multiplicity;
  }

  void train_weighted(std::span<const double> features, int label, int multiplicity) {
    if (features.size() != static_cast<std::size_t>(num_features_))
      throw ShapeError("learner: feature length mismatch");
    if (label < 0) throw DomainError("learner: negative label");
    if (static_cast<std::size_t>(label) >= classes_.size())
      classes_.resize(static_cast<std::size_t>(label) + 1);  // streams may grow m
    ClassStats& stats = classes_[static_cast<std::size_t>(label)];
    if (stats.mean.empty()) {
      stats.mean.assign(features_.size(), 0.0);
      stats.m2.assign(features_.size(), 0.0);
    }
    for (int rep = 0; rep < multiplicity; ++rep) {
      ++stats.count;
      ++total_count_;
      for (std::size_t k = 0; k < features_.size(); ++k) {
        const double x = features[static_cast<std::size_t>(features_[k])];
        const double delta = x - stats.mean[k];
        stats.mean[k] += delta / static_cast<double>(stats.count);
        stats.m2[k] += delta * (x - stats.mean[k]);
      }
    }
  }

  long long total_training_count() const { return total_count_; }
  long long class_count(int label) const {
    return static_cast<std::size_t>(label) < classes_.size()
               ? classes_[static_cast<std::size_t>(label)].count
               : 0;
  }
  const std::vector<int>& feature_subset() const { return features_; }
  int num_classes() const { return static_cast<int>(classes_.size()); }

 private:
  struct ClassStats {
    long long count = 0;
    std::vector<double> mean;
    std::vector<double> m2;
  };

  static constexpr double kVarianceFloor = 1e-6;

  int num_features_;
  double bagging_rate_;
  Rng rng_;
  std::vector<int> features_;
  std::vector<ClassStats> classes_;
  long long total_count_ = 0;
};

/// Least-squares ensemble weights over a window of (votes, ideal) pairs:
/// minimizes sum_t |sum_i W_i S_i(t) - o(t)|^2 + ridge*|W|^2 via the normal
/// equations; minimum-norm on degenerate windows at ridge == 0.
inline WeightVector fit_weights(std::span<const VoteMatrix> window_votes,
                                std::span<const IdealVector> window_targets, double ridge) {
  if (window_votes.empty()) throw DomainError("fit_weights: empty window");
  if (window_votes.size() != window_targets.size())
    throw ShapeError("fit_weights: votes/targets length mismatch");
  const std::size_t n = window_votes.front().num_classifiers();
  const std::size_t m = window_votes.front().num_classes();

  std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  for (std::size_t t = 0; t < window_votes.size(); ++t) {
    const VoteMatrix& votes = window_votes[t];
    if (votes.num_classifiers() != n) throw ShapeError("fit_weights: classifier count varies");
    validate_vote_matrix(votes, m);
    if (static_cast<std::size_t>(window_targets[t].num_classes) != m)
      throw ShapeError("fit_weights: target class count mismatch");
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const double aij = votes.rows[i].scores[j];
        if (aij == 0.0) continue;
        auto& grow = gram[i];
        for (std::size_t k = i; k < n; ++k) grow[k] += aij * votes.rows[k].scores[j];
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      rhs[i] += votes.rows[i].scores[static_cast<std::size_t>(window_targets[t].class_index)];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < i; ++k) gram[i][k] = gram[k][i];

  return WeightVector{solve_normal_equations(std::move(gram), rhs, ridge)};
}

/// One prequential step's bookkeeping: predicted class is the argmax of the
/// combined vote, ties broken toward the lowest class index.
struct PrequentialRecord {
  long long instance_index = 0;
  int predicted = 0;
  int actual = 0;
  std::vector<double> ensemble_vote;
};

struct VotePrediction {
  int predicted = 0;
  std::vector<double> ensemble_vote;
};

inline VotePrediction ensemble_predict(const WeightVector& weights, const VoteMatrix& votes) {
  VotePrediction out;
  out.ensemble_vote = combine_votes(weights, votes);
  out.predicted = 0;
  for (std::size_t j = 1; j < out.ensemble_vote.size(); ++j) {
    if (out.ensemble_vote[j] > out.ensemble_vote[static_cast<std::size_t>(out.predicted)])
      out.predicted = static_cast<int>(j);
  }
  return out;
}

struct PrequentialResult {
  double accuracy = 0.0;
  long long instances_seen = 0;
  long long correct = 0;
  std::vector<PrequentialRecord> records;
};

using VoteMatrixSink = std::function<void(const VoteMatrix&)>;

/// Test-then-train evaluation: each instance is predicted with the current
/// weights, logged, then used to train every learner; weights refresh from the
/// trailing window every `window` instances. Fully deterministic per seed.
inline PrequentialResult run_prequential(const std::vector<StreamInstance>& stream,
                                         int num_classes, const EnsembleConfig& cfg,
                                         const VoteMatrixSink& vote_sink = {},
                                         bool keep_records = true) {
  validate_ensemble_config(cfg);
  if (stream.empty()) throw DomainError("run_prequential: empty stream");
  if (num_classes < 2) throw DomainError("run_prequential: need at least 2 classes");
  const std::size_t num_features = stream.front().features.size();
  for (const auto& inst : stream) {
    if (inst.features.size() != num_features)
      throw ShapeError("run_prequential: feature length varies within the stream");
    if (inst.label < 0 || inst.label >= num_classes)
      throw DomainError("run_prequential: label outside [0, m)");
  }

  std::vector<OnlineGaussianLearner> learners;
  learners.reserve(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    learners.emplace_back(num_classes, static_cast<int>(num_features), cfg.feature_fraction,
                          cfg.bagging_rate, derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
  }

  WeightVector weights;
  weights.weights.assign(static_cast<std::size_t>(cfg.n), 1.0 / static_cast<double>(cfg.n));

  std::vector<VoteMatrix> window_votes;
  std::vector<IdealVector> window_targets;
  window_votes.reserve(static_cast<std::size_t>(cfg.window));
  window_targets.reserve(static_cast<std::size_t>(cfg.window));

  PrequentialResult result;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const StreamInstance& inst = stream[t];
    VoteMatrix votes;
    votes.instance_id = static_cast<std::int64_t>(t);
    votes.rows.reserve(learners.size());
    for (const auto& learner : learners) votes.rows.push_back(learner.predict(inst.features));

    VotePrediction prediction = ensemble_predict(weights, votes);
    if (prediction.predicted == inst.label) ++result.correct;
    ++result.instances_seen;
    if (keep_records) {
      result.records.push_back(PrequentialRecord{static_cast<long long>(t), prediction.predicted,
                                                 inst.label, std::move(prediction.ensemble_vote)});
    }
    if (vote_sink) vote_sink(votes);

    window_targets.push_back(ideal_vector(inst.label, num_classes));
    window_votes.push_back(std::move(votes));
    for (auto& learner : learners) learner.train(inst.features, inst.label);

    if (window_votes.size() == static_cast<std::size_t>(cfg.window)) {
      weights = fit_weights(window_votes, window_targets, cfg.ridge);
      window_votes.clear();
      window_targets.clear();
    }
  }
  result.accuracy =
      static_cast<double>(result.correct) / static_cast<double>(result.instances_seen);
  return result;
}

}  // namespace votespan
