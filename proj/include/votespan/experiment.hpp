#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "csv.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "format.hpp"
#include "independence.hpp"
#include "p_estimator.hpp"
#include "types.hpp"

namespace votespan {

/// Accuracy-vs-ensemble-size sweep over one stream. The dependence profile is
/// estimated online from the largest size's votes (the run with the most
/// opportunities for the span to grow), and a minimal size for the target
/// probability is derived from it.
struct SweepConfig {
  std::vector<int> sizes{2, 4, 8, 16, 32, 64, 128};
  double target_probability = 0.999;
  std::uint64_t seed = 1;
  int jobs = 1;
  double tol = kDefaultTol;  // rank tolerance for the profile estimator
  EnsembleConfig engine;     // n and seed are overridden per swept size
};

struct SweepOutput {
  std::vector<SweepResult> results;            // ordered as cfg.sizes
  DependenceProfile estimated_profile;         // from the largest size's run
  SizeRecommendation recommendation;           // min size at target probability
  std::vector<double> reach_at_size;           // reach probability per swept size
  int num_classes = 0;
};

namespace detail {

inline void validate_sweep_sizes(const std::vector<int>& sizes) {
  if (sizes.empty()) throw DomainError("sweep: need at least one ensemble size");
  int prev = 0;
  for (int s : sizes) {
    if (s < 1) throw DomainError("sweep: ensemble sizes must be at least 1");
    if (s <= prev) throw DomainError("sweep: ensemble sizes must be strictly increasing");
    prev = s;
  }
}

}  // namespace detail

/// Optional per-run hooks; `record_sink(size, records)` receives the
/// prequential log of each run and `vote_writer` the largest run's votes.
struct SweepHooks {
  std::function<void(int, const std::vector<PrequentialRecord>&)> record_sink;
  VoteMatrixSink largest_vote_sink;
};

inline SweepOutput run_sweep(const std::vector<StreamInstance>& stream, int num_classes,
                             const SweepConfig& cfg, const SweepHooks& hooks = {}) {
  detail::validate_sweep_sizes(cfg.sizes);
  if (cfg.jobs < 1) throw DomainError("sweep: jobs must be at least 1");
  if (!(cfg.target_probability > 0 && cfg.target_probability < 1))
    throw DomainError("sweep: target probability must lie in (0, 1)");

  const std::size_t count = cfg.sizes.size();
  const int largest = cfg.sizes.back();

  SweepOutput out;
  out.num_classes = num_classes;
  out.results.resize(count);
  DependenceEstimator estimator(num_classes, cfg.tol);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= count) return;
      try {
        const int size = cfg.sizes[idx];
        EnsembleConfig engine = cfg.engine;
        engine.n = size;
        engine.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(size));
        const bool is_largest = size == largest;
        VoteMatrixSink sink;
        if (is_largest) {
          sink = [&](const VoteMatrix& votes) {
            estimator.observe(votes);
            if (hooks.largest_vote_sink) hooks.largest_vote_sink(votes);
          };
        }
        const bool keep = static_cast<bool>(hooks.record_sink);
        PrequentialResult run = run_prequential(stream, num_classes, engine, sink, keep);
        if (hooks.record_sink) hooks.record_sink(size, run.records);
        out.results[idx] =
            SweepResult{size, run.accuracy, run.instances_seen, engine.seed};
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int threads = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(cfg.jobs), count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  out.estimated_profile = estimator.profile();
  out.recommendation = min_ensemble_size(num_classes, out.estimated_profile,
                                         cfg.target_probability);
  out.reach_at_size.reserve(count);
  for (int size : cfg.sizes)
    out.reach_at_size.push_back(reach_probability(size, num_classes, out.estimated_profile));
  return out;
}

inline std::string sweep_csv(const SweepOutput& out) {
  std::string text = "ensemble_size,accuracy,instances_seen,seed\n";
  for (const auto& r : out.results) {
    text += std::to_string(r.ensemble_size) + ',' + fmt_g12(r.accuracy) + ',' +
            std::to_string(r.instances_seen) + ',' + std::to_string(r.seed) + '\n';
  }
  return text;
}

inline std::string sweep_summary_json(const SweepOutput& out) {
  std::vector<double> accuracies;
  std::vector<int> sizes;
  for (const auto& r : out.results) {
    sizes.push_back(r.ensemble_size);
    accuracies.push_back(r.accuracy);
  }
  std::string json = "{";
  json += "\"num_classes\":" + std::to_string(out.num_classes);
  json += ",\"target\":" + fmt_g12(out.recommendation.target);
  json += ",\"estimated_profile\":" + json_array_g12(out.estimated_profile.p);
  json += ",\"n_min\":";
  json += out.recommendation.unreachable() ? std::string("\"unreachable\"")
                                           : std::to_string(*out.recommendation.n_min);
  json += ",\"achieved\":" + fmt_g12(out.recommendation.achieved);
  json += ",\"sizes\":" + json_array_int(sizes);
  json += ",\"accuracies\":" + json_array_g12(accuracies);
  json += ",\"reach_probabilities\":" + json_array_g12(out.reach_at_size);
  json += "}";
  return json;
}

inline std::string records_csv(const std::vector<PrequentialRecord>& records) {
  std::string text = "instance_index,predicted,actual\n";
  for (const auto& r : records) {
    text += std::to_string(r.instance_index) + ',' + std::to_string(r.predicted) + ',' +
            std::to_string(r.actual) + '\n';
  }
  return text;
}

}  // namespace votespan
