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

// Command-line front end. Every command resolves its flags into a JSON config
// snapshot, runs from that snapshot alone, and prints one RunReport document.
// `replay` re-runs a saved report's snapshot.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "edfilter/cardinality_model.hpp"
#include "edfilter/search.hpp"

namespace edfilter::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

std::string_view tool_version();

// Bad flag values or an inconsistent config; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Log {
 public:
  Log(std::ostream& err, bool verbose) : err_(&err), verbose_(verbose) {}
  void info(std::string_view msg) const;
  void warn(std::string_view msg) const;

 private:
  std::ostream* err_;
  bool verbose_;
};

struct BenchmarkSuiteConfig {
  std::vector<int> sample_sizes{500, 1000, 1500, 2000};
  std::vector<int> feature_counts{15};
  int repeats = 1;
  std::vector<Algorithm> algorithms{Algorithm::kGreedy, Algorithm::kHybrid};
  std::uint64_t seed = 1;
  int n_informative = 4;
  int n_classes = 4;
  double noise_rate = 0.1;
  int max_count = 6;
  bool prune = true;
  std::size_t seed_size = 5;
  // Soft per-cell budget; a cell over budget is recorded as timed out.
  std::optional<double> cell_time_limit_ms;

  void validate() const;
};

nlohmann::json to_json(const BenchmarkSuiteConfig& c);
BenchmarkSuiteConfig benchmark_from_json(const nlohmann::json& j);

// Seed of the synthetic matrix behind one benchmark cell.
std::uint64_t cell_seed(const BenchmarkSuiteConfig& c, int n_rows, int n_features, int repeat);

struct BenchmarkRow {
  Algorithm algorithm = Algorithm::kGreedy;
  int n_rows = 0;
  int n_features = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  double theta = 0.0;
  double runtime_ms = 0.0;
  std::size_t evaluations = 0;
  bool timed_out = false;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  // theta_greedy - theta_hybrid over cells where both ran.
  std::optional<double> max_gap;
  std::optional<double> min_gap;
  std::optional<double> mean_gap;
};

BenchmarkReport run_benchmark(const BenchmarkSuiteConfig& suite, const CvConfig& cv,
                              const Discretization& discretization,
                              const CardinalityModel* model, const Log& log);

nlohmann::json to_json(const BenchmarkReport& r);

inline constexpr std::string_view kBenchmarkCsvHeader =
    "algorithm,n_rows,n_features,repeat,seed,theta,runtime_ms,evaluations,timed_out";
void write_benchmark_csv(const BenchmarkReport& r, std::ostream& out);

// Hex FNV-1a digest of a file's bytes, recorded so replay can detect changed inputs.
std::string file_digest(const std::string& path);

// Runs `command` from a resolved config snapshot and returns its result.
nlohmann::json execute(std::string_view command, const nlohmann::json& config, const Log& log);

// Copy of j with every "runtime_ms" member removed, at any depth.
nlohmann::json strip_timings(const nlohmann::json& j);

// Full entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edfilter::cli
