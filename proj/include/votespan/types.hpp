#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace votespan {

/// Central absolute tolerance. All rank / normalization checks default to it;
/// callers may override per operation.
inline constexpr double kDefaultTol = 1e-9;

namespace detail {

inline bool all_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace detail

/// One classifier's score vector over the m class labels. Components sum to 1.
/// Components may be negative: only raw scores are required nonnegative, and
/// weighted combinations of votes can leave the simplex.
struct VoteVector {
  std::vector<double> scores;

  std::size_t size() const { return scores.size(); }
  double operator[](std::size_t j) const { return scores[j]; }

  bool operator==(const VoteVector&) const = default;
};

/// One-hot vector pointing at an instance's true class label.
struct IdealVector {
  int class_index = 0;
  int num_classes = 0;

  double operator[](int j) const { return j == class_index ? 1.0 : 0.0; }

  std::vector<double> to_dense() const {
    std::vector<double> v(static_cast<std::size_t>(num_classes), 0.0);
    v[static_cast<std::size_t>(class_index)] = 1.0;
    return v;
  }

  bool operator==(const IdealVector&) const = default;
};

/// All component classifiers' votes for one instance; row i is classifier i.
struct VoteMatrix {
  std::vector<VoteVector> rows;
  std::int64_t instance_id = 0;

  std::size_t num_classifiers() const { return rows.size(); }
  std::size_t num_classes() const { return rows.empty() ? 0 : rows.front().size(); }

  bool operator==(const VoteMatrix&) const = default;
};

/// Ensemble weights W_1..W_n; the ensemble vote is sum_i W_i * S_i.
struct WeightVector {
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }

  bool operator==(const WeightVector&) const = default;
};

/// p[k-1] = p_k = probability that a fresh vote is linearly dependent on a
/// k-dimensional span of earlier votes. Length m-1 for an m-class stream.
struct DependenceProfile {
  std::vector<double> p;

  int num_classes() const { return static_cast<int>(p.size()) + 1; }

  bool operator==(const DependenceProfile&) const = default;
};

struct StreamInstance {
  std::vector<double> features;
  int label = 0;

  bool operator==(const StreamInstance&) const = default;
};

/// One point of an accuracy-vs-ensemble-size sweep.
struct SweepResult {
  int ensemble_size = 0;
  double accuracy = 0.0;
  long long instances_seen = 0;
  std::uint64_t seed = 0;

  bool operator==(const SweepResult&) const = default;
};

/// Scales a raw nonnegative score vector so its components sum to 1.
inline VoteVector normalize_vote(std::span<const double> raw) {
  if (raw.size() < 2) throw DomainError("normalize_vote: need at least 2 class scores");
  double sum = 0.0;
  for (double x : raw) {
    if (!std::isfinite(x)) throw NormalizationError("normalize_vote: non-finite score");
    if (x < 0.0) throw NormalizationError("normalize_vote: negative raw score");
    sum += x;
  }
  if (sum <= 0.0) throw NormalizationError("normalize_vote: all scores are zero");
  VoteVector v;
  v.scores.resize(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) v.scores[j] = raw[j] / sum;
  return v;
}

inline VoteVector normalize_vote(const std::vector<double>& raw) {
  return normalize_vote(std::span<const double>(raw));
}

inline IdealVector ideal_vector(int class_index, int num_classes) {
  if (num_classes < 2) throw DomainError("ideal_vector: need at least 2 classes");
  if (class_index < 0 || class_index >= num_classes)
    throw DomainError("ideal_vector: class index " + std::to_string(class_index) +
                      " out of range [0, " + std::to_string(num_classes) + ")");
  return IdealVector{class_index, num_classes};
}

/// True when the components are finite and sum to 1 within tol.
inline bool is_normalized(const VoteVector& v, double tol = kDefaultTol) {
  if (v.size() < 2 || !detail::all_finite(v.scores)) return false;
  double sum = 0.0;
  for (double x : v.scores) sum += x;
  return std::abs(sum - 1.0) <= tol;
}

/// Rectangular, n >= 1, every row a valid length-m vote. Throws ShapeError.
inline void validate_vote_matrix(const VoteMatrix& votes, std::size_t num_classes) {
  if (votes.rows.empty()) throw ShapeError("vote matrix has no rows");
  for (const auto& row : votes.rows) {
    if (row.size() != num_classes)
      throw ShapeError("vote matrix row length " + std::to_string(row.size()) +
                       " does not match class count " + std::to_string(num_classes));
    if (!detail::all_finite(row.scores)) throw ShapeError("vote matrix contains non-finite score");
  }
}

/// Profile must have m-1 entries, each a probability. Throws DomainError.
inline void validate_profile(const DependenceProfile& profile, int num_classes) {
  if (num_classes < 2) throw DomainError("dependence profile: need at least 2 classes");
  if (static_cast<int>(profile.p.size()) != num_classes - 1)
    throw DomainError("dependence profile length " + std::to_string(profile.p.size()) +
                      " does not match class count " + std::to_string(num_classes) +
                      " (expected m-1 entries)");
  for (double pk : profile.p) {
    if (!(pk >= 0.0 && pk <= 1.0))
      throw DomainError("dependence probability outside [0, 1]");
  }
}

}  // namespace votespan
