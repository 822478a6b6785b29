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

#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>

#include "edfilter/classifier.hpp"
#include "edfilter/cli.hpp"
#include "edfilter/dataset.hpp"
#include "edfilter/info_theory.hpp"
#include "json_io.hpp"

namespace edfilter::cli {

std::string_view tool_version() { return EDFILTER_VERSION; }

void Log::info(std::string_view msg) const {
  if (verbose_) *err_ << "edfilter: " << msg << '\n';
}

void Log::warn(std::string_view msg) const { *err_ << "edfilter: warning: " << msg << '\n'; }

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json strip_timings(const nlohmann::json& j) {
  if (j.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : j.items()) {
      if (key != "runtime_ms") out[key] = strip_timings(value);
    }
    return out;
  }
  if (j.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : j) out.push_back(strip_timings(v));
    return out;
  }
  return j;
}

nlohmann::json cv_to_json(const CvConfig& cv) {
  return {{"k", cv.k}, {"seed", cv.seed}, {"alpha", cv.alpha}};
}

CvConfig cv_from_json(const nlohmann::json& j) {
  CvConfig cv;
  cv.k = j.at("k").get<int>();
  cv.seed = j.at("seed").get<std::uint64_t>();
  cv.alpha = j.at("alpha").get<double>();
  return cv;
}

nlohmann::json discretization_to_json(const Discretization& d) {
  if (d.kind == Discretization::Kind::kPresence) return {{"kind", "presence"}};
  return {{"kind", "equal_width"}, {"bins", d.bins}};
}

Discretization discretization_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "presence") return Discretization::presence();
  if (kind == "equal_width") return Discretization::equal_width(j.at("bins").get<int>());
  throw UsageError("unknown discretization '" + kind + "'");
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"seed", c.seed},
          {"validation_fraction", c.validation_fraction},
          {"hidden", c.hidden},
          {"shuffle", c.shuffle}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.validation_fraction = j.at("validation_fraction").get<double>();
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.shuffle = j.at("shuffle").get<bool>();
  return c;
}

namespace {

void check_digest(const std::string& path, const nlohmann::json& recorded) {
  if (recorded.is_null()) return;
  if (file_digest(path) != recorded.get<std::string>()) {
    throw DataError("'" + path + "' changed since the report was written");
  }
}

FeatureMatrix load_input(const nlohmann::json& config, const Log& log) {
  const auto path = config.at("data").get<std::string>();
  check_digest(path, config.value("data_digest", nlohmann::json()));
  FeatureMatrix m = load_csv(path);
  log.info("loaded " + path + ": " + std::to_string(m.n_rows()) + " rows, " +
           std::to_string(m.n_features()) + " features, " + std::to_string(m.n_classes()) +
           " classes");
  return m;
}

SearchConfig search_config(const nlohmann::json& config) {
  SearchConfig cfg;
  cfg.cv = cv_from_json(config.at("cv"));
  cfg.discretization = discretization_from_json(config.at("discretization"));
  cfg.seed_size = config.value("seed_size", cfg.seed_size);
  cfg.prune = config.value("prune", cfg.prune);
  if (config.contains("max_expansions") && !config["max_expansions"].is_null()) {
    cfg.max_expansions = config["max_expansions"].get<std::size_t>();
  }
  if (config.contains("time_limit_ms") && !config["time_limit_ms"].is_null()) {
    cfg.time_limit_ms = config["time_limit_ms"].get<double>();
  }
  cfg.literal_theta_min = config.value("literal_theta_min", false);
  return cfg;
}

std::optional<CardinalityModel> load_model_input(const nlohmann::json& config) {
  if (!config.contains("model") || config["model"].is_null()) return std::nullopt;
  const auto path = config["model"].get<std::string>();
  check_digest(path, config.value("model_digest", nlohmann::json()));
  return load_model(path);
}

nlohmann::json run_synth(const nlohmann::json& config, const Log& log) {
  const SynthSpec spec = config.at("spec").get<SynthSpec>();
  const FeatureMatrix m = synth_generate(spec);
  const auto path = config.at("csv").get<std::string>();
  save_csv(m, path);
  log.info("wrote " + path);
  return {{"result",
           {{"csv", path},
            {"csv_digest", file_digest(path)},
            {"n_rows", m.n_rows()},
            {"n_features", m.n_features()},
            {"n_classes", m.n_classes()},
            {"class_sizes", m.class_sizes()},
            {"feature_names", m.feature_names()}}}};
}

nlohmann::json run_rank(const nlohmann::json& config, const Log& log) {
  const FeatureMatrix m = load_input(config, log);
  const RankedFeatures ranked =
      rank_features(m, discretization_from_json(config.at("discretization")));
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < ranked.order.size(); ++i) {
    rows.push_back({{"feature", m.feature_names()[ranked.order[i]]}, {"score", ranked.scores[i]}});
  }
  if (!config.contains("top_k")) return {{"result", rows}};

  // IG top-k baseline: the k best-ranked features scored as one subset.
  const auto k = config["top_k"].get<std::size_t>();
  if (k == 0 || k > m.n_features()) {
    throw UsageError("--top-k must be between 1 and " + std::to_string(m.n_features()));
  }
  const FeatureSubset top(std::vector<std::size_t>(ranked.order.begin(), ranked.order.begin() + k));
  nlohmann::json names = nlohmann::json::array();
  for (std::size_t f : top.indices()) names.push_back(m.feature_names()[f]);
  return {{"result", rows},
          {"diagnostics",
           {{"top_k",
             {{"k", k},
              {"indices", top.indices()},
              {"features", names},
              {"theta", accuracy(m, top, cv_from_json(config.at("cv")))}}}}}};
}

nlohmann::json run_select(const nlohmann::json& config, const Log& log) {
  const FeatureMatrix m = load_input(config, log);
  const Algorithm algorithm = parse_algorithm(config.at("algorithm").get<std::string>());
  const SearchConfig cfg = search_config(config);
  SelectionResult r;
  switch (algorithm) {
    case Algorithm::kExact: r = exact_search(m, cfg); break;
    case Algorithm::kGreedy: r = greedy_search(m, cfg); break;
    case Algorithm::kOracle: r = brute_force_oracle(m, cfg); break;
    case Algorithm::kHybrid: {
      const auto model = load_model_input(config);
      if (!model) throw UsageError("hybrid selection needs --model");
      r = hybrid_search(m, *model, cfg);
      break;
    }
  }
  log.info(std::string(algorithm_name(algorithm)) + ": theta=" + std::to_string(r.theta) +
           " subset=" + r.subset.to_string());
  nlohmann::json diagnostics = diagnostics_json(r);
  if (!config.value("prune_log", false)) diagnostics.erase("prune_log");
  return {{"result", to_json(r, m)}, {"diagnostics", diagnostics}};
}

nlohmann::json run_train(const nlohmann::json& config, const Log& log) {
  const auto paths = config.at("data").get<std::vector<std::string>>();
  const auto digests = config.value("data_digests", nlohmann::json::array());
  SearchConfig search = search_config(config);
  const auto chunk_size = config.at("chunk_size").get<std::size_t>();
  const auto chunk_seed = config.at("chunk_seed").get<std::uint64_t>();
  const auto n_max = config.at("n_max").get<std::size_t>();
  const auto labeler_name = config.at("labeler").get<std::string>();
  Labeler labeler = Labeler::kAuto;
  if (labeler_name == "oracle") {
    labeler = Labeler::kOracle;
  } else if (labeler_name == "exact") {
    labeler = Labeler::kExact;
  } else if (labeler_name != "auto") {
    throw UsageError("unknown labeler '" + labeler_name + "'");
  }
  const TrainConfig train_cfg = train_config_from_json(config.at("train"));

  std::vector<TrainingExample> examples;
  nlohmann::json chunks = nlohmann::json::array();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (i < digests.size()) check_digest(paths[i], digests[i]);
    const FeatureMatrix m = load_csv(paths[i]);
    std::vector<ChunkLabel> labels;
    auto part = gen_training_data(m, chunk_size, chunk_seed, labeler, search, n_max, &labels);
    log.info(paths[i] + ": " + std::to_string(part.size()) + " labelled chunks");
    for (const auto& l : labels) {
      chunks.push_back({{"source", paths[i]},
                        {"rows", l.rows},
                        {"cardinality", l.optimum.size()},
                        {"indices", l.optimum.indices()},
                        {"theta", l.theta},
                        {"budget_exhausted", l.budget_exhausted}});
    }
    examples.insert(examples.end(), part.begin(), part.end());
  }
  if (examples.size() < 2) {
    throw DataError("training needs at least 2 labelled chunks, got " +
                    std::to_string(examples.size()));
  }
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& e : examples) ++histogram[e.label + 1];
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [c, n] : histogram) hist[std::to_string(c)] = n;

  TrainSummary summary;
  const CardinalityModel model = train(examples, train_cfg, &summary);
  const auto out_path = config.at("model_out").get<std::string>();
  save_model(model, out_path);
  log.info("wrote model " + out_path);
  return {{"result",
           {{"model", out_path},
            {"model_digest", file_digest(out_path)},
            {"examples", examples.size()},
            {"cardinality_histogram", hist},
            {"chunks", chunks},
            {"train_examples", summary.train_examples},
            {"validation_examples", summary.validation_examples},
            {"best_epoch", summary.best_epoch},
            {"best_validation_loss", summary.best_validation_loss},
            {"validation_accuracy", summary.validation_accuracy},
            {"final_train_loss", summary.train_loss.empty() ? 0.0 : summary.train_loss.back()}}}};
}

nlohmann::json run_benchmark_command(const nlohmann::json& config, const Log& log) {
  const BenchmarkSuiteConfig suite = benchmark_from_json(config.at("suite"));
  const auto model = load_model_input(config);
  const BenchmarkReport report =
      run_benchmark(suite, cv_from_json(config.at("cv")),
                    discretization_from_json(config.at("discretization")),
                    model ? &*model : nullptr, log);
  if (config.contains("csv") && !config["csv"].is_null()) {
    const auto path = config["csv"].get<std::string>();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_benchmark_csv(report, out);
    log.info("wrote " + path);
  }
  return {{"result", to_json(report)}};
}

}  // namespace

nlohmann::json execute(std::string_view command, const nlohmann::json& config, const Log& log) {
  try {
    if (command == "synth") return run_synth(config, log);
    if (command == "rank") return run_rank(config, log);
    if (command == "select" || command == "oracle") return run_select(config, log);
    if (command == "train") return run_train(config, log);
    if (command == "benchmark") return run_benchmark_command(config, log);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  throw UsageError("unknown command '" + std::string(command) + "'");
}

}  // namespace edfilter::cli
