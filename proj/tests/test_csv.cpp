#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "votespan/csv.hpp"
#include "votespan/stream.hpp"

using namespace votespan;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::path("csv_test_tmp");
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

}  // namespace

TEST_CASE("string labels index in first-seen order", "[csv]") {
  const auto path = temp_file("labels.csv");
  write_file(path, "x,y,target\n1.0,2.0,a\n3.5,4.5,b\n5.0,6.0,a\n");
  const LoadedStream loaded = load_csv_stream(path.string(), "target");
  REQUIRE(loaded.instances.size() == 3);
  CHECK(loaded.num_classes == 2);
  CHECK(loaded.instances[0].label == 0);
  CHECK(loaded.instances[1].label == 1);
  CHECK(loaded.instances[2].label == 0);
  CHECK(loaded.label_names == std::vector<std::string>{"a", "b"});
  CHECK(loaded.instances[1].features == std::vector<double>{3.5, 4.5});
}

TEST_CASE("label column can be given as an index", "[csv]") {
  const auto path = temp_file("label_index.csv");
  write_file(path, "c0,c1,c2\n0.5,up,1.5\n0.25,down,2.5\n");
  const LoadedStream loaded = load_csv_stream(path.string(), "1");
  CHECK(loaded.num_classes == 2);
  CHECK(loaded.instances[0].features == std::vector<double>{0.5, 1.5});
  CHECK_THROWS_AS(load_csv_stream(path.string(), "nope"), DomainError);
}

TEST_CASE("malformed cells report the offending row", "[csv]") {
  const auto path = temp_file("bad_cell.csv");
  write_file(path, "x,y,label\nabc,2.0,a\n3.0,4.0,b\n");
  try {
    load_csv_stream(path.string(), "label");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  const auto ragged = temp_file("ragged.csv");
  write_file(ragged, "x,y,label\n1.0,a\n");
  CHECK_THROWS_AS(load_csv_stream(ragged.string(), "label"), ParseError);

  CHECK_THROWS_AS(load_csv_stream("does_not_exist.csv", "label"), IoError);
}

TEST_CASE("a generated stream survives a dump/load round trip", "[csv]") {
  RbfConfig cfg;
  cfg.num_classes = 4;
  cfg.num_features = 6;
  cfg.instances = 500;
  cfg.seed = 9;
  const auto stream = rbf_stream(cfg);
  const auto path = temp_file("roundtrip.csv");
  write_stream_csv(path.string(), stream);
  const LoadedStream loaded = load_csv_stream(path.string(), "label");
  REQUIRE(loaded.instances.size() == stream.size());
  CHECK(loaded.num_classes == 4);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    CHECK(loaded.instances[i].label == stream[i].label);
    REQUIRE(loaded.instances[i].features.size() == stream[i].features.size());
    for (std::size_t f = 0; f < stream[i].features.size(); ++f)
      CHECK(std::abs(loaded.instances[i].features[f] - stream[i].features[f]) <= 1e-12);
  }
}

TEST_CASE("electricity-shaped file loads at full size", "[csv]") {
  const auto path = temp_file("elec_like.csv");
  {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << "f0,f1,f2,f3,f4,f5,label\n";
    Rng rng(31);
    for (int i = 0; i < 45312; ++i) {
      for (int f = 0; f < 6; ++f) out << fmt_g12(rng.next_double()) << ',';
      out << (rng.next_double() < 0.5 ? "UP" : "DOWN") << '\n';
    }
  }
  const LoadedStream loaded = load_csv_stream(path.string(), "label");
  CHECK(loaded.instances.size() == 45312);
  CHECK(loaded.num_classes == 2);
  CHECK(loaded.instances.front().features.size() == 6);
}

TEST_CASE("recorded votes round trip through their CSV format", "[csv]") {
  PlantedVoteConfig cfg;
  cfg.profile = DependenceProfile{{0.4, 0.1}};
  cfg.num_classes = 3;
  cfg.votes_per_instance = 5;
  cfg.instances = 40;
  cfg.seed = 77;
  const auto votes = synthetic_vote_stream(cfg);
  const auto path = temp_file("votes.csv");
  write_votes_csv(path.string(), votes);
  const auto loaded = read_votes_csv(path.string());
  REQUIRE(loaded.size() == votes.size());
  for (std::size_t i = 0; i < votes.size(); ++i) {
    CHECK(loaded[i].instance_id == votes[i].instance_id);
    CHECK(loaded[i].rows == votes[i].rows);  // 17-digit dump restores doubles exactly
  }
}

TEST_CASE("votes reader rejects foreign headers", "[csv]") {
  const auto path = temp_file("not_votes.csv");
  write_file(path, "a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(read_votes_csv(path.string()), ParseError);
}
