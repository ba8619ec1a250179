// votespan command-line tool: independence probabilities, minimal ensemble
// sizes, dependence-profile estimation, stream generation, and prequential
// accuracy-vs-size sweeps. Every command is deterministic given its flags.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "votespan/votespan.hpp"

namespace {

using namespace votespan;

DependenceProfile parse_profile(const std::string& text, int num_classes) {
  DependenceProfile profile;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string cell =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      profile.p.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw DomainError("--p: cannot parse '" + cell + "' as a probability");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  validate_profile(profile, num_classes);  // rejects length != m-1 and bad values
  return profile;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << text;
}

std::string recommendation_json(const SizeRecommendation& rec) {
  std::string json = "{\"n_min\":";
  json += rec.unreachable() ? std::string("\"unreachable\"") : std::to_string(*rec.n_min);
  json += ",\"target\":" + fmt_g12(rec.target);
  json += ",\"achieved\":" + fmt_g12(rec.achieved);
  json += "}";
  return json;
}

std::string profile_json(const DependenceEstimator& estimator) {
  const EstimatorState& state = estimator.state();
  const DependenceProfile profile = estimator.profile();
  // the last count slots are structurally unused; report only dimensions 1..m-1
  std::vector<long long> dep(state.dependent_counts.begin(), state.dependent_counts.end() - 1);
  std::vector<long long> tot(state.total_counts.begin(), state.total_counts.end() - 1);
  std::string json = "{";
  json += "\"num_classes\":" + std::to_string(estimator.num_classes());
  json += ",\"p\":" + json_array_g12(profile.p);
  json += ",\"dependent_counts\":" + json_array_int(dep);
  json += ",\"total_counts\":" + json_array_int(tot);
  json += ",\"instances\":" + std::to_string(state.instances_processed);
  json += "}";
  return json;
}

struct GlobalFlags {
  std::uint64_t seed = 1;
  double tol = kDefaultTol;
  int jobs = 1;
  std::string output;
};

int run(int argc, char** argv) {
  CLI::App app{
      "votespan: geometric vote-independence analysis for online ensembles.\n"
      "Numeric results print with 12 significant digits; data dumps use 17."};
  app.require_subcommand(1);

  GlobalFlags global;
  app.add_option("--seed", global.seed, "base RNG seed (default 1)");
  app.add_option("--tol", global.tol, "absolute rank/normalization tolerance (default 1e-9)");
  app.add_option("--jobs", global.jobs, "worker threads for sweeps / simulation partitions");
  app.add_option("--output", global.output, "output file path (command-specific)");

  // ---- prob ----------------------------------------------------------------
  long long prob_n = 0;
  int prob_m = 0;
  std::string prob_p;
  auto* prob = app.add_subcommand(
      "prob", "Probability that n votes contain m linearly independent ones.\n"
              "Prints one number.");
  prob->fallthrough();
  prob->add_option("--n", prob_n, "ensemble size")->required();
  prob->add_option("--m", prob_m, "class-label count")->required();
  prob->add_option("--p", prob_p, "comma-separated dependence profile p_1..p_{m-1}")->required();

  // ---- min-size ------------------------------------------------------------
  int ms_m = 0;
  std::string ms_p;
  double ms_target = 0.999;
  auto* min_size = app.add_subcommand(
      "min-size", "Smallest ensemble size reaching a target independence probability.\n"
                  "Prints JSON {n_min,target,achieved}; n_min is \"unreachable\" when no\n"
                  "size can meet the target.");
  min_size->fallthrough();
  min_size->add_option("--m", ms_m, "class-label count")->required();
  min_size->add_option("--p", ms_p, "comma-separated dependence profile")->required();
  min_size->add_option("--target", ms_target, "target probability in (0,1), default 0.999");

  // ---- estimate-p ----------------------------------------------------------
  std::string est_votes;
  int est_m = 0;
  std::string est_p;
  int est_votes_per_instance = 8;
  long long est_instances = 10000;
  auto* estimate = app.add_subcommand(
      "estimate-p", "Estimate the dependence profile from recorded votes (--votes CSV with\n"
                    "columns instance_id,classifier_id,s0..s{m-1}) or from a generated\n"
                    "stream with a planted profile (--m/--p/--votes-per-instance/--instances).\n"
                    "Prints JSON {num_classes,p,dependent_counts,total_counts,instances}.");
  estimate->fallthrough();
  estimate->add_option("--votes", est_votes, "recorded-votes CSV path");
  estimate->add_option("--m", est_m, "class-label count (generator mode)");
  estimate->add_option("--p", est_p, "planted dependence profile (generator mode)");
  estimate->add_option("--votes-per-instance", est_votes_per_instance, "votes per instance");
  estimate->add_option("--instances", est_instances, "generated instance count");

  // ---- simulate ------------------------------------------------------------
  long long sim_n = 0;
  int sim_m = 0;
  std::string sim_p;
  long long sim_trials = 200000;
  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo walk of the dimension chain vs the exact probability.\n"
                  "Prints JSON {empirical,exact,gap}. --jobs sets the partition count.");
  simulate->fallthrough();
  simulate->add_option("--n", sim_n, "ensemble size")->required();
  simulate->add_option("--m", sim_m, "class-label count")->required();
  simulate->add_option("--p", sim_p, "comma-separated dependence profile")->required();
  simulate->add_option("--trials", sim_trials, "Monte Carlo trials (default 200000)");

  // ---- gen -----------------------------------------------------------------
  std::string gen_kind;
  int gen_m = 2;
  int gen_features = 20;
  int gen_centroids = 5;
  double gen_noise = 0.05;
  long long gen_instances = 1000;
  std::string gen_p;
  int gen_votes_per_instance = 8;
  auto* gen = app.add_subcommand(
      "gen", "Dump a generated stream to --output.\n"
             "--kind rbf: dataset CSV with header f0..f{d-1},label.\n"
             "--kind votes: recorded-votes CSV (needs --p, --votes-per-instance).");
  gen->fallthrough();
  gen->add_option("--kind", gen_kind, "rbf or votes")->required();
  gen->add_option("--m", gen_m, "class-label count");
  gen->add_option("--features", gen_features, "feature count (rbf)");
  gen->add_option("--centroids", gen_centroids, "centroids per class (rbf)");
  gen->add_option("--noise", gen_noise, "Gaussian noise std (rbf)");
  gen->add_option("--instances", gen_instances, "instance count");
  gen->add_option("--p", gen_p, "planted dependence profile (votes)");
  gen->add_option("--votes-per-instance", gen_votes_per_instance, "votes per instance (votes)");

  // ---- sweep ---------------------------------------------------------------
  std::string sweep_sizes = "2,4,8,16,32,64,128";
  std::string sweep_csv_path;
  std::string sweep_label_column = "label";
  bool sweep_rbf = false;
  int sw_m = 4;
  int sw_features = 20;
  int sw_centroids = 5;
  double sw_noise = 0.05;
  long long sw_instances = 10000;
  double sw_target = 0.999;
  int sw_window = 500;
  double sw_ridge = 1e-6;
  double sw_bagging = 1.0;
  double sw_feature_fraction = 0.5;
  std::string sw_summary;
  std::string sw_dump_votes;
  std::string sw_records_prefix;
  auto* sweep = app.add_subcommand(
      "sweep", "Prequential accuracy for each ensemble size, plus a dependence profile\n"
               "estimated from the largest run and the minimal size at --target.\n"
               "Writes CSV (ensemble_size,accuracy,instances_seen,seed) to --output;\n"
               "prints a JSON summary (or writes it to --summary).");
  sweep->fallthrough();
  sweep->add_option("--sizes", sweep_sizes, "comma-separated ensemble sizes, strictly increasing");
  sweep->add_option("--csv", sweep_csv_path, "dataset CSV path (mutually exclusive with --rbf)");
  sweep->add_option("--label-column", sweep_label_column, "label column name or 0-based index");
  sweep->add_flag("--rbf", sweep_rbf, "use the synthetic radial-basis stream");
  sweep->add_option("--m", sw_m, "class-label count (rbf)");
  sweep->add_option("--features", sw_features, "feature count (rbf)");
  sweep->add_option("--centroids", sw_centroids, "centroids per class (rbf)");
  sweep->add_option("--noise", sw_noise, "Gaussian noise std (rbf)");
  sweep->add_option("--instances", sw_instances, "instance count (rbf)");
  sweep->add_option("--target", sw_target, "target independence probability (default 0.999)");
  sweep->add_option("--window", sw_window, "weight refresh window (default 500)");
  sweep->add_option("--ridge", sw_ridge, "ridge for windowed weight fitting (default 1e-6)");
  sweep->add_option("--bagging-rate", sw_bagging, "Poisson online-bagging rate (default 1)");
  sweep->add_option("--feature-fraction", sw_feature_fraction,
                    "feature share per learner in (0,1] (default 0.5)");
  sweep->add_option("--summary", sw_summary, "write the JSON summary here instead of stdout");
  sweep->add_option("--dump-votes", sw_dump_votes, "record the largest run's votes to this CSV");
  sweep->add_option("--records", sw_records_prefix,
                    "write per-run records to <prefix><size>.csv (instance_index,predicted,actual)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help text or the usage error
    return code == 0 ? 0 : 2;
  }

  if (prob->parsed()) {
    const DependenceProfile profile = parse_profile(prob_p, prob_m);
    std::printf("%s\n", fmt_g12(reach_probability(prob_n, prob_m, profile)).c_str());
    return 0;
  }

  if (min_size->parsed()) {
    const DependenceProfile profile = parse_profile(ms_p, ms_m);
    const SizeRecommendation rec = min_ensemble_size(ms_m, profile, ms_target);
    std::printf("%s\n", recommendation_json(rec).c_str());
    return 0;
  }

  if (estimate->parsed()) {
    if (!est_votes.empty()) {
      const std::vector<VoteMatrix> votes = read_votes_csv(est_votes);
      if (votes.empty()) throw DomainError("estimate-p: votes file holds no instances");
      DependenceEstimator estimator(static_cast<int>(votes.front().num_classes()), global.tol);
      for (const auto& v : votes) estimator.observe(v);
      std::printf("%s\n", profile_json(estimator).c_str());
      return 0;
    }
    if (est_m == 0 || est_p.empty())
      throw DomainError("estimate-p: need either --votes or --m with --p");
    PlantedVoteConfig cfg;
    cfg.num_classes = est_m;
    cfg.profile = parse_profile(est_p, est_m);
    cfg.votes_per_instance = est_votes_per_instance;
    cfg.instances = est_instances;
    cfg.seed = global.seed;
    PlantedVoteStream source(cfg);
    DependenceEstimator estimator(est_m, global.tol);
    for (long long i = 0; i < cfg.instances; ++i) estimator.observe(source.next());
    std::printf("%s\n", profile_json(estimator).c_str());
    return 0;
  }

  if (simulate->parsed()) {
    const DependenceProfile profile = parse_profile(sim_p, sim_m);
    const double exact = reach_probability(sim_n, sim_m, profile);
    const double empirical = simulate_chain_partitioned(sim_n, sim_m, profile, sim_trials,
                                                        global.seed, global.jobs);
    std::string json = "{\"empirical\":" + fmt_g12(empirical);
    json += ",\"exact\":" + fmt_g12(exact);
    json += ",\"gap\":" + fmt_g12(std::abs(empirical - exact));
    json += "}";
    std::printf("%s\n", json.c_str());
    return 0;
  }

  if (gen->parsed()) {
    if (global.output.empty()) throw DomainError("gen: --output is required");
    if (gen_kind == "rbf") {
      RbfConfig cfg;
      cfg.num_classes = gen_m;
      cfg.num_features = gen_features;
      cfg.centroids_per_class = gen_centroids;
      cfg.noise_std = gen_noise;
      cfg.instances = gen_instances;
      cfg.seed = global.seed;
      write_stream_csv(global.output, rbf_stream(cfg));
      return 0;
    }
    if (gen_kind == "votes") {
      if (gen_p.empty()) throw DomainError("gen --kind votes: --p is required");
      PlantedVoteConfig cfg;
      cfg.num_classes = gen_m;
      cfg.profile = parse_profile(gen_p, gen_m);
      cfg.votes_per_instance = gen_votes_per_instance;
      cfg.instances = gen_instances;
      cfg.seed = global.seed;
      write_votes_csv(global.output, synthetic_vote_stream(cfg));
      return 0;
    }
    throw DomainError("gen: --kind must be rbf or votes");
  }

  if (sweep->parsed()) {
    if (global.output.empty()) throw DomainError("sweep: --output is required");
    if (sweep_rbf == !sweep_csv_path.empty())
      throw DomainError("sweep: pass exactly one of --rbf or --csv");

    std::vector<StreamInstance> stream;
    int num_classes = 0;
    if (sweep_rbf) {
      RbfConfig cfg;
      cfg.num_classes = sw_m;
      cfg.num_features = sw_features;
      cfg.centroids_per_class = sw_centroids;
      cfg.noise_std = sw_noise;
      cfg.instances = sw_instances;
      cfg.seed = global.seed;
      stream = rbf_stream(cfg);
      num_classes = sw_m;
    } else {
      LoadedStream loaded = load_csv_stream(sweep_csv_path, sweep_label_column);
      if (loaded.instances.empty()) throw DomainError("sweep: dataset holds no instances");
      stream = std::move(loaded.instances);
      num_classes = loaded.num_classes;
    }

    SweepConfig cfg;
    cfg.sizes.clear();
    for (const std::string& cell : detail::split_csv_line(sweep_sizes)) {
      try {
        cfg.sizes.push_back(std::stoi(cell));
      } catch (const std::exception&) {
        throw DomainError("--sizes: cannot parse '" + cell + "'");
      }
    }
    cfg.target_probability = sw_target;
    cfg.seed = global.seed;
    cfg.jobs = global.jobs;
    cfg.tol = global.tol;
    cfg.engine.window = sw_window;
    cfg.engine.ridge = sw_ridge;
    cfg.engine.bagging_rate = sw_bagging;
    cfg.engine.feature_fraction = sw_feature_fraction;

    std::optional<std::ofstream> votes_file;
    std::optional<VotesCsvWriter> votes_writer;
    SweepHooks hooks;
    if (!sw_dump_votes.empty()) {
      votes_file.emplace(sw_dump_votes, std::ios::binary);
      if (!*votes_file) throw IoError("cannot open output file: " + sw_dump_votes);
      votes_writer.emplace(*votes_file);
      hooks.largest_vote_sink = [&](const VoteMatrix& v) { votes_writer->write(v); };
    }
    if (!sw_records_prefix.empty()) {
      hooks.record_sink = [&](int size, const std::vector<PrequentialRecord>& records) {
        write_text_file(sw_records_prefix + std::to_string(size) + ".csv", records_csv(records));
      };
    }

    const SweepOutput out = run_sweep(stream, num_classes, cfg, hooks);
    write_text_file(global.output, sweep_csv(out));
    const std::string summary = sweep_summary_json(out);
    if (sw_summary.empty()) {
      std::printf("%s\n", summary.c_str());
    } else {
      write_text_file(sw_summary, summary + "\n");
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const votespan::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const votespan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
