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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "edfilter/cli.hpp"

namespace edfilter::cli {

void BenchmarkSuiteConfig::validate() const {
  auto positive = [](const std::vector<int>& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](int x) { return x > 0; });
  };
  if (!positive(sample_sizes)) throw UsageError("sample_sizes must be a non-empty list of positive sizes");
  if (!positive(feature_counts)) throw UsageError("feature_counts must be a non-empty list of positive counts");
  if (repeats < 1) throw UsageError("repeats must be at least 1");
  if (algorithms.empty()) throw UsageError("benchmark needs at least one algorithm");
  if (n_informative < 1 || n_classes < 2 || max_count < 1 || seed_size < 1) {
    throw UsageError("n_informative, max_count and seed_size must be positive and n_classes >= 2");
  }
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) throw UsageError("noise_rate must lie in [0, 1]");
  for (int f : feature_counts) {
    if (f < n_informative) {
      throw UsageError("feature count " + std::to_string(f) + " is below n_informative");
    }
    if (f > static_cast<int>(kOracleMaxFeatures) &&
        std::find(algorithms.begin(), algorithms.end(), Algorithm::kOracle) != algorithms.end()) {
      throw UsageError("oracle cells are limited to " + std::to_string(kOracleMaxFeatures) +
                       " features");
    }
  }
  if (cell_time_limit_ms && !(*cell_time_limit_ms > 0.0)) {
    throw UsageError("cell time limit must be positive");
  }
}

nlohmann::json to_json(const BenchmarkSuiteConfig& c) {
  nlohmann::json algorithms = nlohmann::json::array();
  for (Algorithm a : c.algorithms) algorithms.push_back(std::string(algorithm_name(a)));
  return {{"sample_sizes", c.sample_sizes},
          {"feature_counts", c.feature_counts},
          {"repeats", c.repeats},
          {"algorithms", algorithms},
          {"seed", c.seed},
          {"n_informative", c.n_informative},
          {"n_classes", c.n_classes},
          {"noise_rate", c.noise_rate},
          {"max_count", c.max_count},
          {"prune", c.prune},
          {"seed_size", c.seed_size},
          {"cell_time_limit_ms", c.cell_time_limit_ms ? nlohmann::json(*c.cell_time_limit_ms)
                                                      : nlohmann::json(nullptr)}};
}

BenchmarkSuiteConfig benchmark_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{
      "sample_sizes", "feature_counts", "repeats",   "algorithms", "seed",
      "n_informative", "n_classes",     "noise_rate", "max_count",  "prune",
      "seed_size",    "cell_time_limit_ms"};
  if (!j.is_object()) throw UsageError("benchmark config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw UsageError("unknown benchmark config field '" + key + "'");
    }
  }
  BenchmarkSuiteConfig c;
  try {
    if (j.contains("sample_sizes")) c.sample_sizes = j["sample_sizes"].get<std::vector<int>>();
    if (j.contains("feature_counts")) c.feature_counts = j["feature_counts"].get<std::vector<int>>();
    if (j.contains("repeats")) c.repeats = j["repeats"].get<int>();
    if (j.contains("algorithms")) {
      c.algorithms.clear();
      for (const auto& a : j["algorithms"]) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n_informative")) c.n_informative = j["n_informative"].get<int>();
    if (j.contains("n_classes")) c.n_classes = j["n_classes"].get<int>();
    if (j.contains("noise_rate")) c.noise_rate = j["noise_rate"].get<double>();
    if (j.contains("max_count")) c.max_count = j["max_count"].get<int>();
    if (j.contains("prune")) c.prune = j["prune"].get<bool>();
    if (j.contains("seed_size")) c.seed_size = j["seed_size"].get<std::size_t>();
    if (j.contains("cell_time_limit_ms") && !j["cell_time_limit_ms"].is_null()) {
      c.cell_time_limit_ms = j["cell_time_limit_ms"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad benchmark config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  c.validate();
  return c;
}

std::uint64_t cell_seed(const BenchmarkSuiteConfig& c, int n_rows, int n_features, int repeat) {
  std::uint64_t h = c.seed;
  for (std::uint64_t v : {static_cast<std::uint64_t>(n_rows), static_cast<std::uint64_t>(n_features),
                          static_cast<std::uint64_t>(repeat)}) {
    h = (h ^ v) * 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

BenchmarkReport run_benchmark(const BenchmarkSuiteConfig& suite, const CvConfig& cv,
                              const Discretization& discretization,
                              const CardinalityModel* model, const Log& log) {
  suite.validate();
  const bool wants_hybrid = std::find(suite.algorithms.begin(), suite.algorithms.end(),
                                      Algorithm::kHybrid) != suite.algorithms.end();
  if (wants_hybrid && model == nullptr) throw UsageError("hybrid benchmark cells need a model");

  SearchConfig cfg;
  cfg.cv = cv;
  cfg.discretization = discretization;
  cfg.seed_size = suite.seed_size;
  cfg.prune = suite.prune;
  cfg.time_limit_ms = suite.cell_time_limit_ms;

  BenchmarkReport report;
  std::vector<double> gaps;
  for (int n_rows : suite.sample_sizes) {
    for (int n_features : suite.feature_counts) {
      for (int repeat = 0; repeat < suite.repeats; ++repeat) {
        SynthSpec spec;
        spec.n_rows = n_rows;
        spec.n_features = n_features;
        spec.n_informative = suite.n_informative;
        spec.n_classes = suite.n_classes;
        spec.noise_rate = suite.noise_rate;
        spec.max_count = suite.max_count;
        spec.seed = cell_seed(suite, n_rows, n_features, repeat);
        const FeatureMatrix m = synth_generate(spec);

        std::optional<double> greedy_theta;
        std::optional<double> hybrid_theta;
        for (Algorithm a : suite.algorithms) {
          SelectionResult r;
          switch (a) {
            case Algorithm::kExact: r = exact_search(m, cfg); break;
            case Algorithm::kGreedy: r = greedy_search(m, cfg); break;
            case Algorithm::kHybrid: r = hybrid_search(m, *model, cfg); break;
            case Algorithm::kOracle: r = brute_force_oracle(m, cfg); break;
          }
          BenchmarkRow row{a,       n_rows,       n_features,    repeat,
                           spec.seed, r.theta, r.runtime_ms, r.evaluations,
                           r.budget_exhausted && suite.cell_time_limit_ms.has_value()};
          if (row.timed_out) {
            log.warn("cell " + std::string(algorithm_name(a)) + " " + std::to_string(n_rows) + "x" +
                     std::to_string(n_features) + " hit the time limit");
          } else if (a == Algorithm::kGreedy) {
            greedy_theta = r.theta;
          } else if (a == Algorithm::kHybrid) {
            hybrid_theta = r.theta;
          }
          log.info(std::string(algorithm_name(a)) + " " + std::to_string(n_rows) + "x" +
                   std::to_string(n_features) + " theta=" + std::to_string(r.theta));
          report.rows.push_back(row);
        }
        if (greedy_theta && hybrid_theta) gaps.push_back(*greedy_theta - *hybrid_theta);
      }
    }
  }
  if (!gaps.empty()) {
    report.max_gap = *std::max_element(gaps.begin(), gaps.end());
    report.min_gap = *std::min_element(gaps.begin(), gaps.end());
    double sum = 0.0;
    for (double g : gaps) sum += g;
    report.mean_gap = sum / static_cast<double>(gaps.size());
  }
  return report;
}

nlohmann::json to_json(const BenchmarkReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"algorithm", algorithm_name(row.algorithm)},
                    {"n_rows", row.n_rows},
                    {"n_features", row.n_features},
                    {"repeat", row.repeat},
                    {"seed", row.seed},
                    {"theta", row.theta},
                    {"runtime_ms", row.runtime_ms},
                    {"evaluations", row.evaluations},
                    {"timed_out", row.timed_out}});
  }
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"rows", rows},
          {"gap_max", opt(r.max_gap)},
          {"gap_min", opt(r.min_gap)},
          {"gap_mean", opt(r.mean_gap)}};
}

void write_benchmark_csv(const BenchmarkReport& r, std::ostream& out) {
  out << kBenchmarkCsvHeader << '\n';
  char buf[64];
  for (const auto& row : r.rows) {
    out << algorithm_name(row.algorithm) << ',' << row.n_rows << ',' << row.n_features << ','
        << row.repeat << ',' << row.seed << ',';
    std::snprintf(buf, sizeof buf, "%.17g", row.theta);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.3f", row.runtime_ms);
    out << buf << ',' << row.evaluations << ',' << (row.timed_out ? 1 : 0) << '\n';
  }
}

}  // namespace edfilter::cli
