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

#pragma once

// Wrapper feature-subset searches driven by cross-validated accuracy (theta)
// and the information-gain accuracy bound (theta_bar):
//
//  * exact_search       best-first branch and bound over canonical prefixes
//  * greedy_search      add/remove hill climbing from the best singletons
//  * hybrid_search      greedy_search with grow moves capped at a predicted
//                       cardinality
//  * brute_force_oracle exhaustive enumeration, used as a test oracle
//
// All searches are deterministic given the matrix and configuration.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "edfilter/classifier.hpp"
#include "edfilter/dataset.hpp"
#include "edfilter/feature_subset.hpp"
#include "edfilter/info_theory.hpp"

namespace edfilter {

class CardinalityModel;

enum class Algorithm { kExact, kGreedy, kHybrid, kOracle };

std::string_view algorithm_name(Algorithm a);
// Throws std::invalid_argument for anything but exact|greedy|hybrid|oracle.
Algorithm parse_algorithm(std::string_view name);

struct SearchConfig {
  CvConfig cv;
  Discretization discretization;
  // Seed singletons for greedy and hybrid.
  std::size_t seed_size = 5;
  bool prune = true;
  // Heap pops allowed before the search stops with budget_exhausted.
  std::optional<std::size_t> max_expansions;
  // Soft wall-clock budget; also reported as budget_exhausted.
  std::optional<double> time_limit_ms;
  // Debug: theta_min takes the last popped theta and the last popped subset is
  // returned, instead of the running maximum and the incumbent.
  bool literal_theta_min = false;
  // Workers for child evaluation; 0 means worker_threads().
  int threads = 0;
};

struct SearchEntry {
  FeatureSubset subset;
  double theta = 0.0;
  double theta_bar = 0.0;
};

// The stop test fired: the popped entry's bound fell below theta_min.
struct PruneEvent {
  FeatureSubset subset;
  double theta = 0.0;
  double theta_bar = 0.0;
  double theta_min = 0.0;
  // Entries discarded with it, the popped one included.
  std::size_t discarded = 0;
};

// Plug-in bound consistency over every subset that had both theta and IG
// computed during a run.
struct BoundStats {
  std::size_t pairs = 0;
  // Fano inequality fails for the measured (theta, IG).
  std::size_t fano_violations = 0;
  // theta exceeds the clamped upper bound.
  std::size_t bound_violations = 0;

  double fano_violation_rate() const {
    return pairs == 0 ? 0.0 : static_cast<double>(fano_violations) / pairs;
  }
};

struct SelectionResult {
  Algorithm algorithm = Algorithm::kExact;
  FeatureSubset subset;
  double theta = 0.0;
  std::size_t evaluations = 0;
  std::size_t prunes = 0;
  std::size_t expansions = 0;
  double runtime_ms = 0.0;
  bool budget_exhausted = false;

  // Hybrid only.
  std::optional<std::size_t> cardinality_cap;
  // Improving moves applied after a bound stop left the incumbent unexpanded.
  std::size_t polish_moves = 0;
  std::vector<PruneEvent> prune_log;
  BoundStats bound_stats;
};

// Schema: {algorithm, features, indices, theta, evaluations, prunes,
// expansions, runtime_ms, budget_exhausted}.
nlohmann::json to_json(const SelectionResult& r, const FeatureMatrix& m);
// Bound statistics, prune log, cardinality cap and polish count.
nlohmann::json diagnostics_json(const SelectionResult& r);

// Memoised theta / IG / theta_bar for one matrix. Thread safe; each distinct
// canonical subset is evaluated once and counted once.
class SubsetScorer {
 public:
  SubsetScorer(const FeatureMatrix& m, const CvConfig& cv,
               const Discretization& discretization = Discretization::presence());

  double theta(const FeatureSubset& s);
  double info_gain(const FeatureSubset& s);
  double theta_bar(const FeatureSubset& s);
  SearchEntry entry(const FeatureSubset& s);

  std::size_t evaluations() const;
  BoundStats bound_stats() const;

  std::size_t n_features() const { return n_features_; }
  int n_classes() const { return n_classes_; }

  // Every theta computed so far.
  std::unordered_map<FeatureSubset, double, FeatureSubsetHash> theta_table() const;

 private:
  AccuracyEvaluator accuracy_;
  InfoGainTable gains_;
  std::size_t n_features_;
  int n_classes_;
  mutable std::mutex mutex_;
  std::unordered_map<FeatureSubset, double, FeatureSubsetHash> theta_memo_;
  std::unordered_map<FeatureSubset, double, FeatureSubsetHash> ig_memo_;
};

SelectionResult exact_search(const FeatureMatrix& m, const SearchConfig& cfg);
SelectionResult greedy_search(const FeatureMatrix& m, const SearchConfig& cfg);
// Greedy with grow moves skipped once |subset| >= cap.
SelectionResult capped_greedy_search(const FeatureMatrix& m, const SearchConfig& cfg,
                                     std::size_t cap);
// Cap predicted by the model; throws ModelError on an incompatible model.
SelectionResult hybrid_search(const FeatureMatrix& m, const CardinalityModel& model,
                              const SearchConfig& cfg);

inline constexpr std::size_t kOracleMaxFeatures = 12;

// Throws DataError when n_features exceeds max_features.
SelectionResult brute_force_oracle(const FeatureMatrix& m, const SearchConfig& cfg,
                                   std::size_t max_features = kOracleMaxFeatures);

// No single add (only while |subset| < max_cardinality) and no single removal
// leaving a non-empty set strictly increases theta.
bool is_local_optimum(const FeatureMatrix& m, const FeatureSubset& subset, const CvConfig& cv,
                      std::optional<std::size_t> max_cardinality = std::nullopt);
bool is_local_optimum(SubsetScorer& scorer, const FeatureSubset& subset,
                      std::optional<std::size_t> max_cardinality = std::nullopt);

}  // namespace edfilter
