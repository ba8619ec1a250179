#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "votespan/independence.hpp"
#include "votespan/linalg.hpp"
#include "votespan/stream.hpp"

using namespace votespan;

TEST_CASE("rbf stream is a pure function of its config", "[stream]") {
  RbfConfig cfg;
  cfg.num_classes = 3;
  cfg.num_features = 4;
  cfg.instances = 5;
  cfg.seed = 1;
  CHECK(rbf_stream(cfg) == rbf_stream(cfg));
  cfg.seed = 2;
  CHECK(rbf_stream(cfg) != rbf_stream(RbfConfig{3, 4, 5, 0.05, 5, 1}));
}

TEST_CASE("zero-noise single-centroid stream repeats the centroids", "[stream]") {
  RbfConfig cfg;
  cfg.num_classes = 2;
  cfg.num_features = 3;
  cfg.centroids_per_class = 1;
  cfg.noise_std = 0.0;
  cfg.instances = 200;
  cfg.seed = 5;
  const auto stream = rbf_stream(cfg);
  std::vector<std::vector<double>> seen_per_class(2);
  for (const auto& inst : stream) {
    auto& expected = seen_per_class[static_cast<std::size_t>(inst.label)];
    if (expected.empty()) {
      expected = inst.features;
    } else {
      CHECK(inst.features == expected);
    }
  }
}

TEST_CASE("rbf labels are near-uniform", "[stream]") {
  RbfConfig cfg;
  cfg.num_classes = 4;
  cfg.num_features = 2;
  cfg.instances = 100000;
  cfg.seed = 3;
  const auto stream = rbf_stream(cfg);
  std::vector<long long> histogram(4, 0);
  for (const auto& inst : stream) ++histogram[static_cast<std::size_t>(inst.label)];
  for (long long count : histogram) {
    CHECK(count >= 24750);
    CHECK(count <= 25250);
  }
}

TEST_CASE("rbf config validation", "[stream]") {
  RbfConfig bad;
  bad.num_classes = 1;
  CHECK_THROWS_AS(rbf_stream(bad), DomainError);
  bad = RbfConfig{};
  bad.noise_std = -1.0;
  CHECK_THROWS_AS(rbf_stream(bad), DomainError);
}

TEST_CASE("planted vote stream hits the requested ranks exactly at the ends", "[stream]") {
  SECTION("all-zero profile gives full rank every instance") {
    PlantedVoteConfig cfg;
    cfg.profile = DependenceProfile{{0.0, 0.0}};
    cfg.num_classes = 3;
    cfg.votes_per_instance = 3;
    cfg.instances = 100;
    cfg.seed = 11;
    for (const auto& votes : synthetic_vote_stream(cfg)) {
      std::vector<std::vector<double>> rows;
      for (const auto& r : votes.rows) rows.push_back(r.scores);
      CHECK(rank_with_tolerance(rows).rank == 3);
    }
  }
  SECTION("all-one profile pins every instance at rank one") {
    PlantedVoteConfig cfg;
    cfg.profile = DependenceProfile{{1.0, 1.0}};
    cfg.num_classes = 3;
    cfg.votes_per_instance = 6;
    cfg.instances = 100;
    cfg.seed = 11;
    for (const auto& votes : synthetic_vote_stream(cfg)) {
      std::vector<std::vector<double>> rows;
      for (const auto& r : votes.rows) rows.push_back(r.scores);
      CHECK(rank_with_tolerance(rows).rank == 1);
    }
  }
}

TEST_CASE("planted votes keep the vote-vector contract", "[stream]") {
  PlantedVoteConfig cfg;
  cfg.profile = DependenceProfile{{0.5, 0.3, 0.7}};
  cfg.num_classes = 4;
  cfg.votes_per_instance = 10;
  cfg.instances = 200;
  cfg.seed = 13;
  for (const auto& votes : synthetic_vote_stream(cfg)) {
    for (const auto& row : votes.rows) {
      double sum = 0.0;
      for (double x : row.scores) sum += x;
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
  CHECK(synthetic_vote_stream(cfg) == synthetic_vote_stream(cfg));
}

TEST_CASE("planted dependence rate matches the profile at dimension one", "[stream]") {
  PlantedVoteConfig cfg;
  cfg.profile = DependenceProfile{{0.3}};
  cfg.num_classes = 2;
  cfg.votes_per_instance = 8;
  cfg.instances = 20000;
  cfg.seed = 42;
  PlantedVoteStream source(cfg);
  long long offers = 0, dependent = 0;
  for (long long i = 0; i < cfg.instances; ++i) {
    const VoteMatrix votes = source.next();
    IncrementalRankTracker tracker(2);
    tracker.add_row(votes.rows[0].scores);
    for (std::size_t r = 1; r < votes.rows.size() && tracker.rank() < 2; ++r) {
      ++offers;
      if (!tracker.add_row(votes.rows[r].scores)) ++dependent;
    }
  }
  const double rate = static_cast<double>(dependent) / static_cast<double>(offers);
  CHECK(rate >= 0.28);
  CHECK(rate <= 0.32);
}

TEST_CASE("final span dimension matches the abstract chain", "[stream][property]") {
  PlantedVoteConfig cfg;
  cfg.profile = DependenceProfile{{0.5, 0.5}};
  cfg.num_classes = 3;
  cfg.votes_per_instance = 4;
  cfg.instances = 20000;
  cfg.seed = 21;
  PlantedVoteStream source(cfg);
  std::vector<long long> histogram(3, 0);
  for (long long i = 0; i < cfg.instances; ++i) {
    const VoteMatrix votes = source.next();
    std::vector<std::vector<double>> rows;
    for (const auto& r : votes.rows) rows.push_back(r.scores);
    ++histogram[static_cast<std::size_t>(rank_with_tolerance(rows).rank - 1)];
  }
  const DimensionChainState exact = chain_distribution(4, 3, cfg.profile);
  for (std::size_t d = 0; d < 3; ++d) {
    const double expected = exact.dist[d];
    const double observed =
        static_cast<double>(histogram[d]) / static_cast<double>(cfg.instances);
    const double sigma =
        std::sqrt(std::max(expected * (1.0 - expected), 1e-12) / static_cast<double>(cfg.instances));
    CHECK(std::abs(observed - expected) <= 4.0 * sigma);
  }
}
