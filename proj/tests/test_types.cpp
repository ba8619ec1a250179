#include <catch2/catch.hpp>

#include "votespan/rng.hpp"
#include "votespan/types.hpp"

using namespace votespan;

TEST_CASE("normalize_vote divides by the component sum", "[types]") {
  CHECK(normalize_vote(std::vector<double>{2.0, 2.0}).scores ==
        std::vector<double>{0.5, 0.5});
  CHECK(normalize_vote(std::vector<double>{1.0, 0.0, 0.0}).scores ==
        std::vector<double>{1.0, 0.0, 0.0});
  // sum 4 -> (0.25, 0.75)
  CHECK(normalize_vote(std::vector<double>{1.0, 3.0}).scores ==
        std::vector<double>{0.25, 0.75});
}

TEST_CASE("normalize_vote rejects bad input", "[types]") {
  CHECK_THROWS_AS(normalize_vote(std::vector<double>{0.0, 0.0}), NormalizationError);
  CHECK_THROWS_AS(normalize_vote(std::vector<double>{1.0, std::nan("")}), NormalizationError);
  CHECK_THROWS_AS(normalize_vote(std::vector<double>{-1.0, 2.0}), NormalizationError);
  CHECK_THROWS_AS(normalize_vote(std::vector<double>{1.0}), DomainError);
}

TEST_CASE("normalize_vote is idempotent and sums to one", "[types]") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.below(7);
    std::vector<double> raw(m);
    for (auto& x : raw) x = rng.next_double() * 10.0;
    raw[rng.below(m)] += 0.1;  // keep at least one strictly positive entry
    const VoteVector once = normalize_vote(raw);
    const VoteVector twice = normalize_vote(once.scores);
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      CHECK(std::abs(twice.scores[j] - once.scores[j]) <= 1e-12);
      sum += once.scores[j];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    CHECK(is_normalized(once));
  }
}

TEST_CASE("ideal_vector is one-hot at the class index", "[types]") {
  CHECK(ideal_vector(0, 2).to_dense() == std::vector<double>{1.0, 0.0});
  CHECK(ideal_vector(3, 4).to_dense() == std::vector<double>{0.0, 0.0, 0.0, 1.0});
  CHECK_THROWS_AS(ideal_vector(2, 2), DomainError);
  CHECK_THROWS_AS(ideal_vector(-1, 3), DomainError);
}

TEST_CASE("profile validation enforces length m-1 and [0,1] entries", "[types]") {
  DependenceProfile profile{{0.5, 0.5}};
  CHECK_NOTHROW(validate_profile(profile, 3));
  CHECK_THROWS_AS(validate_profile(profile, 4), DomainError);
  CHECK_THROWS_AS(validate_profile(DependenceProfile{{1.5}}, 2), DomainError);
  CHECK_THROWS_AS(validate_profile(DependenceProfile{{-0.1}}, 2), DomainError);
}
