// Copyright 2026 The ED-Filter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "edfilter/cli.hpp"
#include "json_io.hpp"

namespace edfilter::cli {
namespace {

struct GlobalFlags {
  std::vector<std::string> data;
  std::string out;
  std::optional<std::uint64_t> seed;
  int cv_folds = 5;
  double alpha = 1.0;
  bool verbose = false;
  std::string discretization = "presence";
  int bins = 3;
};

std::string absolute(const std::string& path) {
  return std::filesystem::absolute(path).lexically_normal().string();
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + " needs at least one value");
  return out;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("cannot parse '" + path + "': " + e.what());
  }
}

const std::string& single_data(const GlobalFlags& g) {
  if (g.data.size() != 1) throw UsageError("this command takes exactly one --data file");
  return g.data.front();
}

nlohmann::json common_search(const GlobalFlags& g) {
  CvConfig cv;
  cv.k = g.cv_folds;
  cv.alpha = g.alpha;
  if (g.seed) cv.seed = *g.seed;
  const Discretization d = g.discretization == "presence" ? Discretization::presence()
                                                          : Discretization::equal_width(g.bins);
  return {{"cv", cv_to_json(cv)}, {"discretization", discretization_to_json(d)}};
}

nlohmann::json data_config(const GlobalFlags& g) {
  const auto path = absolute(single_data(g));
  nlohmann::json c = common_search(g);
  c["data"] = path;
  c["data_digest"] = file_digest(path);
  return c;
}

void emit(const nlohmann::json& report, const std::string& out_path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + out_path + "'");
  file << text;
  if (!file) throw DataError("write failed for '" + out_path + "'");
}

nlohmann::json make_report(const std::string& command, const nlohmann::json& argv,
                           const nlohmann::json& config, const Log& log) {
  const auto start = std::chrono::steady_clock::now();
  nlohmann::json body = execute(command, config, log);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json report = {{"tool", "edfilter"},
                           {"version", tool_version()},
                           {"command", command},
                           {"argv", argv},
                           {"config", config}};
  for (auto& [key, value] : body.items()) report[key] = value;
  report["runtime_ms"] = ms;
  return report;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wrapper feature selection with information-theoretic pruning", "edfilter"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all commands");

  GlobalFlags g;
  app.add_option("--data", g.data, "Input CSV (repeatable for train)");
  app.add_option("--out", g.out, "Write the JSON report here instead of stdout");
  app.add_option("--seed", g.seed,
                 "Seed: CV folds for rank/select/oracle, generator for synth, chunks and "
                 "weights for train, matrices for benchmark");
  app.add_option("--cv-folds", g.cv_folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  app.add_option("--alpha", g.alpha, "Laplace smoothing")
      ->check(CLI::PositiveNumber);
  app.add_flag("--verbose,-v", g.verbose, "Progress messages on stderr");
  app.add_option("--discretization", g.discretization, "Count discretization for IG")
      ->check(CLI::IsMember({"presence", "equal-width"}));
  app.add_option("--bins", g.bins, "Bins for equal-width discretization")
      ->check(CLI::Range(2, 1 << 20));

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic count matrix");
  std::string synth_csv;
  std::string synth_config;
  std::optional<int> s_features, s_informative, s_rows, s_classes, s_max_count;
  std::optional<double> s_noise;
  synth->add_option("--csv", synth_csv, "Output CSV path")->required();
  synth->add_option("--config", synth_config, "JSON file with SynthSpec fields");
  synth->add_option("--n-features", s_features)->check(CLI::PositiveNumber);
  synth->add_option("--n-informative", s_informative)->check(CLI::PositiveNumber);
  synth->add_option("--n-rows", s_rows)->check(CLI::PositiveNumber);
  synth->add_option("--n-classes", s_classes)->check(CLI::Range(2, 1 << 20));
  synth->add_option("--noise-rate", s_noise)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--max-count", s_max_count)->check(CLI::PositiveNumber);

  auto* rank = app.add_subcommand("rank", "Rank features by information gain");
  std::optional<std::size_t> top_k;
  rank->add_option("--top-k", top_k, "Also report the accuracy of the k best-ranked features");

  // select
  auto* select = app.add_subcommand("select", "Search for the best feature subset");
  std::string algorithm = "exact";
  std::string model_path;
  bool no_prune = false;
  std::size_t seed_size = 5;
  std::optional<std::size_t> max_expansions;
  std::optional<double> time_limit_ms;
  bool literal_theta_min = false;
  bool prune_log = false;
  select->add_option("--algorithm", algorithm, "Search algorithm")
      ->check(CLI::IsMember({"exact", "greedy", "hybrid", "oracle"}));
  select->add_option("--model", model_path, "Cardinality model (required for hybrid)");
  select->add_flag("--no-prune", no_prune, "Disable bound pruning");
  select->add_option("--seed-size", seed_size, "Seed singletons for greedy/hybrid")
      ->check(CLI::PositiveNumber);
  select->add_option("--max-expansions", max_expansions, "Heap pop budget")
      ->check(CLI::PositiveNumber);
  select->add_option("--time-limit-ms", time_limit_ms, "Soft time budget")
      ->check(CLI::PositiveNumber);
  select->add_flag("--literal-theta-min", literal_theta_min,
                   "Debug: threshold is the last popped theta");
  select->add_flag("--prune-log", prune_log, "Include every prune event in the diagnostics");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive search (at most 12 features)");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the cardinality model");
  std::string model_out;
  std::size_t chunk_size = 200;
  std::string labeler = "auto";
  std::size_t n_max = kDefaultNMax;
  TrainConfig tc;
  std::string hidden = "64,32";
  train_cmd->add_option("--model-out", model_out, "Where to write the model")->required();
  train_cmd->add_option("--chunk-size", chunk_size, "Rows per chunk")->check(CLI::PositiveNumber);
  train_cmd->add_option("--labeler", labeler, "Chunk labeler")
      ->check(CLI::IsMember({"auto", "oracle", "exact"}));
  train_cmd->add_option("--n-max", n_max, "Largest supported feature count")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", tc.epochs)->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch-size", tc.batch_size)->check(CLI::PositiveNumber);
  train_cmd->add_option("--learning-rate", tc.learning_rate)->check(CLI::PositiveNumber);
  train_cmd->add_option("--validation-fraction", tc.validation_fraction)
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--hidden", hidden, "Hidden layer widths, comma separated");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Run a benchmark suite");
  std::string bench_config;
  std::string bench_csv;
  std::string bench_model;
  std::string sample_sizes;
  std::string feature_counts;
  std::string algorithms;
  std::optional<int> repeats, b_informative, b_classes;
  std::optional<double> cell_limit;
  bool bench_no_prune = false;
  bench->add_option("--config", bench_config, "JSON benchmark suite file");
  bench->add_option("--csv", bench_csv, "Write the per-cell curve CSV here");
  bench->add_option("--model", bench_model, "Cardinality model for hybrid cells");
  bench->add_option("--sample-sizes", sample_sizes, "Comma separated row counts");
  bench->add_option("--feature-counts", feature_counts, "Comma separated feature counts");
  bench->add_option("--algorithms", algorithms, "Comma separated algorithms");
  bench->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  bench->add_option("--n-informative", b_informative)->check(CLI::PositiveNumber);
  bench->add_option("--n-classes", b_classes)->check(CLI::Range(2, 1 << 20));
  bench->add_option("--cell-time-limit-ms", cell_limit)->check(CLI::PositiveNumber);
  bench->add_flag("--no-prune", bench_no_prune, "Disable bound pruning");

  auto* replay = app.add_subcommand("replay", "Re-run a saved report from its config");
  std::string report_path;
  replay->add_option("--report", report_path, "Report JSON to replay")->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, err, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, err, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitUsage;
  }

  const Log log(err, g.verbose);
  try {
    std::string command;
    nlohmann::json config;
    nlohmann::json argv = args;
    if (*synth) {
      command = "synth";
      SynthSpec spec;
      if (!synth_config.empty()) spec = read_json_file(synth_config).get<SynthSpec>();
      if (s_features) spec.n_features = *s_features;
      if (s_informative) spec.n_informative = *s_informative;
      if (s_rows) spec.n_rows = *s_rows;
      if (s_classes) spec.n_classes = *s_classes;
      if (s_noise) spec.noise_rate = *s_noise;
      if (s_max_count) spec.max_count = *s_max_count;
      if (g.seed) spec.seed = *g.seed;
      try {
        spec.validate();
      } catch (const DataError& e) {
        throw UsageError(e.what());
      }
      config = {{"spec", spec}, {"csv", absolute(synth_csv)}};
    } else if (*rank) {
      command = "rank";
      config = data_config(g);
      if (top_k) config["top_k"] = *top_k;
    } else if (*select || *oracle) {
      command = *select ? "select" : "oracle";
      config = data_config(g);
      config["algorithm"] = *select ? algorithm : "oracle";
      config["prune"] = !no_prune;
      config["seed_size"] = seed_size;
      config["max_expansions"] =
          max_expansions ? nlohmann::json(*max_expansions) : nlohmann::json(nullptr);
      config["time_limit_ms"] =
          time_limit_ms ? nlohmann::json(*time_limit_ms) : nlohmann::json(nullptr);
      config["literal_theta_min"] = literal_theta_min;
      config["prune_log"] = prune_log;
      config["model"] = nullptr;
      if (algorithm == "hybrid" && *select) {
        if (model_path.empty()) {
          err << select->help();
          throw UsageError("--algorithm hybrid requires --model");
        }
        config["model"] = absolute(model_path);
        config["model_digest"] = file_digest(model_path);
      }
    } else if (*train_cmd) {
      command = "train";
      if (g.data.empty()) throw UsageError("train needs at least one --data file");
      config = common_search(g);
      nlohmann::json paths = nlohmann::json::array();
      nlohmann::json digests = nlohmann::json::array();
      for (const auto& p : g.data) {
        paths.push_back(absolute(p));
        digests.push_back(file_digest(p));
      }
      tc.hidden.clear();
      for (int h : parse_int_list(hidden, "--hidden")) {
        if (h <= 0) throw UsageError("--hidden widths must be positive");
        tc.hidden.push_back(static_cast<std::size_t>(h));
      }
      if (g.seed) tc.seed = *g.seed;
      try {
        tc.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      config["data"] = paths;
      config["data_digests"] = digests;
      config["chunk_size"] = chunk_size;
      config["chunk_seed"] = tc.seed;
      config["labeler"] = labeler;
      config["n_max"] = n_max;
      config["train"] = train_config_to_json(tc);
      config["model_out"] = absolute(model_out);
    } else if (*bench) {
      command = "benchmark";
      nlohmann::json suite =
          bench_config.empty() ? to_json(BenchmarkSuiteConfig{}) : read_json_file(bench_config);
      if (!sample_sizes.empty()) suite["sample_sizes"] = parse_int_list(sample_sizes, "--sample-sizes");
      if (!feature_counts.empty()) {
        suite["feature_counts"] = parse_int_list(feature_counts, "--feature-counts");
      }
      if (!algorithms.empty()) {
        nlohmann::json list = nlohmann::json::array();
        std::stringstream ss(algorithms);
        std::string item;
        while (std::getline(ss, item, ',')) {
          try {
            list.push_back(std::string(algorithm_name(parse_algorithm(item))));
          } catch (const std::invalid_argument&) {
            throw UsageError("--algorithms: unknown algorithm '" + item + "'");
          }
        }
        suite["algorithms"] = list;
      }
      if (repeats) suite["repeats"] = *repeats;
      if (b_informative) suite["n_informative"] = *b_informative;
      if (b_classes) suite["n_classes"] = *b_classes;
      if (cell_limit) suite["cell_time_limit_ms"] = *cell_limit;
      if (bench_no_prune) suite["prune"] = false;
      if (g.seed) suite["seed"] = *g.seed;
      const BenchmarkSuiteConfig parsed = benchmark_from_json(suite);
      CvConfig cv;
      cv.k = g.cv_folds;
      cv.alpha = g.alpha;
      config = common_search(g);
      config["cv"] = cv_to_json(cv);
      config["suite"] = to_json(parsed);
      config["csv"] = bench_csv.empty() ? nlohmann::json(nullptr) : nlohmann::json(absolute(bench_csv));
      config["model"] = nullptr;
      const bool wants_hybrid = std::find(parsed.algorithms.begin(), parsed.algorithms.end(),
                                          Algorithm::kHybrid) != parsed.algorithms.end();
      if (wants_hybrid && bench_model.empty()) {
        throw UsageError("hybrid benchmark cells require --model");
      }
      if (!bench_model.empty()) {
        config["model"] = absolute(bench_model);
        config["model_digest"] = file_digest(bench_model);
      }
    } else if (*replay) {
      const nlohmann::json saved = read_json_file(report_path);
      if (!saved.is_object() || !saved.contains("command") || !saved.contains("config")) {
        throw DataError("'" + report_path + "' is not an edfilter report");
      }
      command = saved["command"].get<std::string>();
      config = saved["config"];
      argv = saved.value("argv", nlohmann::json::array());
      log.info("replaying " + command + " from " + report_path);
    }
    emit(make_report(command, argv, config, log), g.out, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "edfilter: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "edfilter: error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace edfilter::cli
