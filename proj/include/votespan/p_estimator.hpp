#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "types.hpp"

namespace votespan {

/// Raw dependence counts. Arrays have one slot per class label; the last slot
/// can never be touched (a vote in m-space is always dependent on a full-rank
/// span), so the derived profile only exposes p_1..p_{m-1}.
struct EstimatorState {
  std::vector<long long> dependent_counts;
  std::vector<long long> total_counts;
  long long instances_processed = 0;

  bool operator==(const EstimatorState&) const = default;
};

/// Streaming estimator for the dependence probabilities p_k. Per instance it
/// adds classifier votes to a span one at a time, in row order; whenever the
/// running rank stays at d the vote was dependent on a d-dimensional span.
class DependenceEstimator {
 public:
  explicit DependenceEstimator(int num_classes, double tol = kDefaultTol)
      : num_classes_(num_classes), tol_(tol) {
    if (num_classes < 2) throw DomainError("DependenceEstimator: need at least 2 classes");
    if (!(tol > 0.0)) throw DomainError("DependenceEstimator: tolerance must be positive");
    state_.dependent_counts.assign(static_cast<std::size_t>(num_classes), 0);
    state_.total_counts.assign(static_cast<std::size_t>(num_classes), 0);
  }

  /// Processes one instance's vote matrix. The first row never counts (one
  /// vector is always linearly independent); scanning stops once the span is
  /// full-rank.
  void observe(const VoteMatrix& votes) {
    validate_vote_matrix(votes, static_cast<std::size_t>(num_classes_));
    IncrementalRankTracker tracker(static_cast<std::size_t>(num_classes_), tol_);
    tracker.add_row(votes.rows[0].scores);
    int cur_dim = tracker.rank();
    for (std::size_t i = 1; i < votes.rows.size(); ++i) {
      const int prev_dim = cur_dim;
      const bool increased = tracker.add_row(votes.rows[i].scores);
      cur_dim = increased ? prev_dim + 1 : prev_dim;
      if (cur_dim == prev_dim) ++state_.dependent_counts[static_cast<std::size_t>(cur_dim - 1)];
      ++state_.total_counts[static_cast<std::size_t>(prev_dim - 1)];
      if (cur_dim == num_classes_) break;
    }
    ++state_.instances_processed;
  }

  /// Counts from shards over disjoint parts of a stream add exactly.
  void merge(const DependenceEstimator& other) {
    if (other.num_classes_ != num_classes_)
      throw ShapeError("DependenceEstimator::merge: class counts differ");
    for (std::size_t i = 0; i < state_.total_counts.size(); ++i) {
      state_.dependent_counts[i] += other.state_.dependent_counts[i];
      state_.total_counts[i] += other.state_.total_counts[i];
    }
    state_.instances_processed += other.state_.instances_processed;
  }

  /// p_k = dependent/total at dimension k; a dimension that was never offered
  /// a vote gets p_k = 1.
  DependenceProfile profile() const {
    DependenceProfile out;
    out.p.resize(static_cast<std::size_t>(num_classes_ - 1));
    for (std::size_t k = 0; k < out.p.size(); ++k) {
      const long long total = state_.total_counts[k];
      out.p[k] = (total == 0)
                     ? 1.0
                     : static_cast<double>(state_.dependent_counts[k]) / static_cast<double>(total);
    }
    return out;
  }

  const EstimatorState& state() const { return state_; }
  int num_classes() const { return num_classes_; }
  double tolerance() const { return tol_; }

 private:
  int num_classes_;
  double tol_;
  EstimatorState state_;
};

/// Folds a recorded vote stream through the estimator and finalizes.
template <typename VoteMatrixRange>
DependenceProfile estimate_from_stream(const VoteMatrixRange& votes_source, int num_classes,
                                       double tol = kDefaultTol) {
  DependenceEstimator estimator(num_classes, tol);
  for (const VoteMatrix& votes : votes_source) estimator.observe(votes);
  if (estimator.state().instances_processed == 0)
    throw DomainError("estimate_from_stream: empty vote source");
  return estimator.profile();
}

}  // namespace votespan
