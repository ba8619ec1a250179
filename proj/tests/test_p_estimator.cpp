#include <catch2/catch.hpp>

#include <vector>

#include "votespan/p_estimator.hpp"
#include "votespan/stream.hpp"

using namespace votespan;

namespace {

VoteMatrix make_votes(std::vector<std::vector<double>> rows) {
  VoteMatrix votes;
  for (auto& r : rows) votes.rows.push_back(VoteVector{std::move(r)});
  return votes;
}

}  // namespace

TEST_CASE("observe counts follow the sequential rank scan", "[p-estimator]") {
  SECTION("independent pair breaks early with one total") {
    DependenceEstimator est(2);
    est.observe(make_votes({{1, 0}, {0, 1}}));
    CHECK(est.state().total_counts == std::vector<long long>{1, 0});
    CHECK(est.state().dependent_counts == std::vector<long long>{0, 0});
  }
  SECTION("duplicated vote is dependent on the 1-dimensional span") {
    DependenceEstimator est(2);
    est.observe(make_votes({{0.5, 0.5}, {0.5, 0.5}}));
    CHECK(est.state().total_counts == std::vector<long long>{1, 0});
    CHECK(est.state().dependent_counts == std::vector<long long>{1, 0});
  }
  SECTION("m=3 trace: stay, grow, grow, break") {
    DependenceEstimator est(3);
    est.observe(make_votes({{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    CHECK(est.state().total_counts == std::vector<long long>{2, 1, 0});
    CHECK(est.state().dependent_counts == std::vector<long long>{1, 0, 0});
    CHECK(est.state().instances_processed == 1);
  }
  SECTION("row order changes where dependence is charged") {
    DependenceEstimator forward(3), permuted(3);
    forward.observe(make_votes({{1, 0, 0}, {1, 0, 0}, {0, 1, 0}}));
    permuted.observe(make_votes({{1, 0, 0}, {0, 1, 0}, {1, 0, 0}}));
    CHECK(forward.state().dependent_counts == std::vector<long long>{1, 0, 0});
    CHECK(permuted.state().dependent_counts == std::vector<long long>{0, 1, 0});
  }
  SECTION("rows past full rank are never counted") {
    DependenceEstimator est(2);
    est.observe(make_votes({{1, 0}, {0, 1}, {0.5, 0.5}, {0.3, 0.7}}));
    CHECK(est.state().total_counts == std::vector<long long>{1, 0});
  }
  SECTION("shape mismatch") {
    DependenceEstimator est(3);
    CHECK_THROWS_AS(est.observe(make_votes({{1, 0}})), ShapeError);
  }
}

TEST_CASE("profile finalization divides counts and applies the empty-slot rule", "[p-estimator]") {
  SECTION("plain division") {
    DependenceEstimator est(2);
    for (int i = 0; i < 3; ++i) est.observe(make_votes({{0.5, 0.5}, {0.5, 0.5}}));
    for (int i = 0; i < 7; ++i) est.observe(make_votes({{1, 0}, {0, 1}}));
    CHECK(est.profile().p == std::vector<double>{0.3});
  }
  SECTION("a dimension never offered a vote gets p = 1") {
    DependenceEstimator est(3);
    for (int i = 0; i < 5; ++i) est.observe(make_votes({{1, 0, 0}, {0, 1, 0}}));
    // dimension 1 saw 5 independent votes; dimension 2 was never reached with a vote left
    CHECK(est.state().total_counts == std::vector<long long>{5, 0, 0});
    CHECK(est.profile().p == std::vector<double>{0.0, 1.0});
  }
  SECTION("division at both dimensions") {
    DependenceEstimator est(3);
    // engineered counts: dim-1 sees 8 offers with 2 dependent, dim-2 sees 4 with 1
    for (int i = 0; i < 2; ++i) est.observe(make_votes({{1, 0, 0}, {1, 0, 0}, {0, 1, 0}}));
    est.observe(make_votes({{1, 0, 0}, {0, 1, 0}, {0.5, 0.5, 0}, {0, 0, 1}}));
    for (int i = 0; i < 2; ++i) est.observe(make_votes({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    est.observe(make_votes({{1, 0, 0}, {0, 1, 0}}));
    CHECK(est.state().total_counts[0] == 8);
    CHECK(est.state().dependent_counts[0] == 2);
    CHECK(est.state().total_counts[1] == 4);
    CHECK(est.state().dependent_counts[1] == 1);
    CHECK(est.profile().p == std::vector<double>{0.25, 0.25});
  }
}

TEST_CASE("estimate_from_stream on degenerate vote sources", "[p-estimator]") {
  SECTION("all rows identical -> every dimension reads fully dependent") {
    std::vector<VoteMatrix> votes;
    for (int i = 0; i < 10; ++i)
      votes.push_back(make_votes({{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}}));
    CHECK(estimate_from_stream(votes, 3) == DependenceProfile{{1.0, 1.0}});
  }
  SECTION("canonical basis rows -> every dimension reads independent") {
    std::vector<VoteMatrix> votes;
    for (int i = 0; i < 10; ++i)
      votes.push_back(make_votes({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    CHECK(estimate_from_stream(votes, 3) == DependenceProfile{{0.0, 0.0}});
  }
  SECTION("empty source") {
    std::vector<VoteMatrix> votes;
    CHECK_THROWS_AS(estimate_from_stream(votes, 3), DomainError);
  }
}

TEST_CASE("estimator recovers a planted profile", "[p-estimator]") {
  PlantedVoteConfig cfg;
  cfg.profile = DependenceProfile{{0.3}};
  cfg.num_classes = 2;
  cfg.votes_per_instance = 8;
  cfg.instances = 20000;
  cfg.seed = 42;
  PlantedVoteStream source(cfg);
  DependenceEstimator est(2);
  for (long long i = 0; i < cfg.instances; ++i) est.observe(source.next());
  const DependenceProfile recovered = est.profile();
  CHECK(recovered.p[0] >= 0.28);
  CHECK(recovered.p[0] <= 0.32);
}

TEST_CASE("estimator folding is reproducible and mergeable", "[p-estimator]") {
  PlantedVoteConfig cfg;
  cfg.profile = DependenceProfile{{0.4, 0.2}};
  cfg.num_classes = 3;
  cfg.votes_per_instance = 6;
  cfg.instances = 500;
  cfg.seed = 7;
  const std::vector<VoteMatrix> votes = synthetic_vote_stream(cfg);

  DependenceEstimator a(3), b(3);
  for (const auto& v : votes) a.observe(v);
  for (const auto& v : votes) b.observe(v);
  CHECK(a.state() == b.state());

  // sharded counts add exactly
  DependenceEstimator front(3), back(3), merged(3);
  for (std::size_t i = 0; i < votes.size() / 2; ++i) front.observe(votes[i]);
  for (std::size_t i = votes.size() / 2; i < votes.size(); ++i) back.observe(votes[i]);
  merged.merge(front);
  merged.merge(back);
  CHECK(merged.state() == a.state());

  // row order matters: a permuted instance may count differently, but the
  // fold itself is bit-for-bit stable (checked above)
}
