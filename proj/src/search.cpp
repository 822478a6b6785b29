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

#include "edfilter/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_set>

#include "edfilter/bound.hpp"
#include "edfilter/cardinality_model.hpp"
#include "edfilter/parallel.hpp"

namespace edfilter {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Max-heap order: theta_bar, then theta, then smaller cardinality, then
// lexicographically smaller subset.
struct HeapOrder {
  bool operator()(const SearchEntry& a, const SearchEntry& b) const {
    if (a.theta_bar != b.theta_bar) return a.theta_bar < b.theta_bar;
    if (a.theta != b.theta) return a.theta < b.theta;
    if (a.subset.size() != b.subset.size()) return a.subset.size() > b.subset.size();
    return a.subset > b.subset;
  }
};

using Heap = std::priority_queue<SearchEntry, std::vector<SearchEntry>, HeapOrder>;

bool better(const SearchEntry& a, const SearchEntry& b) {
  if (a.theta != b.theta) return a.theta > b.theta;
  return smaller_then_lexicographic(a.subset, b.subset);
}

class Incumbent {
 public:
  void offer(const SearchEntry& e) {
    if (!best_ || better(e, *best_)) best_ = e;
  }
  const SearchEntry& get() const { return *best_; }

 private:
  std::optional<SearchEntry> best_;
};

class Budget {
 public:
  explicit Budget(const SearchConfig& cfg) : cfg_(cfg), start_(Clock::now()) {}

  bool exhausted(std::size_t expansions) const {
    if (cfg_.max_expansions && expansions >= *cfg_.max_expansions) return true;
    if (cfg_.time_limit_ms && elapsed_ms(start_) >= *cfg_.time_limit_ms) return true;
    return false;
  }
  double elapsed() const { return elapsed_ms(start_); }

 private:
  const SearchConfig& cfg_;
  Clock::time_point start_;
};

std::vector<SearchEntry> score_all(SubsetScorer& scorer, const std::vector<FeatureSubset>& subsets,
                                   bool with_bound, int threads) {
  std::vector<SearchEntry> out(subsets.size());
  parallel_for(
      subsets.size(),
      [&](std::size_t i) {
        out[i].subset = subsets[i];
        out[i].theta = scorer.theta(subsets[i]);
        if (with_bound) out[i].theta_bar = scorer.theta_bar(subsets[i]);
      },
      threads);
  return out;
}

void add_bounds(SubsetScorer& scorer, std::vector<SearchEntry>& entries, int threads) {
  parallel_for(
      entries.size(),
      [&](std::size_t i) { entries[i].theta_bar = scorer.theta_bar(entries[i].subset); },
      threads);
}

std::vector<FeatureSubset> neighbours(const FeatureSubset& s, std::size_t n_features,
                                      std::optional<std::size_t> cap) {
  std::vector<FeatureSubset> out;
  if (!cap || s.size() < *cap) {
    for (std::size_t f = 0; f < n_features; ++f) {
      if (!s.contains(f)) out.push_back(s.with(f));
    }
  }
  if (s.size() >= 2) {
    for (std::size_t f : s) out.push_back(s.without(f));
  }
  return out;
}

void finish(SelectionResult& r, SubsetScorer& scorer, const SearchEntry& chosen,
            const Budget& budget) {
  r.subset = chosen.subset;
  r.theta = chosen.theta;
  r.evaluations = scorer.evaluations();
  r.bound_stats = scorer.bound_stats();
  r.runtime_ms = budget.elapsed();
}

void check_searchable(const FeatureMatrix& m) {
  if (m.n_features() == 0) throw DataError("search needs at least one feature");
}

SelectionResult local_search(const FeatureMatrix& m, const SearchConfig& cfg,
                             std::optional<std::size_t> cap, Algorithm tag) {
  check_searchable(m);
  if (cfg.seed_size < 1) throw std::invalid_argument("seed size must be positive");
  if (cfg.seed_size > m.n_features()) {
    throw std::invalid_argument("seed size " + std::to_string(cfg.seed_size) + " exceeds " +
                                std::to_string(m.n_features()) + " features");
  }
  if (cap && *cap < 1) throw std::invalid_argument("cardinality cap must be positive");

  const Budget budget(cfg);
  SubsetScorer scorer(m, cfg.cv, cfg.discretization);
  const std::size_t n = m.n_features();
  SelectionResult result;
  result.algorithm = tag;
  result.cardinality_cap = cap;

  std::vector<FeatureSubset> singles;
  for (std::size_t f = 0; f < n; ++f) singles.push_back(FeatureSubset::singleton(f));
  std::vector<SearchEntry> single_entries = score_all(scorer, singles, true, cfg.threads);
  // A one-feature naive Bayes model predicts from the priors alone, so
  // singleton accuracies tie routinely; break ties by singleton IG, then index.
  std::stable_sort(single_entries.begin(), single_entries.end(),
                   [&](const SearchEntry& a, const SearchEntry& b) {
                     if (a.theta != b.theta) return a.theta > b.theta;
                     return scorer.info_gain(a.subset) > scorer.info_gain(b.subset);
                   });
  single_entries.resize(cfg.seed_size);

  Heap heap;
  Incumbent incumbent;
  std::unordered_set<FeatureSubset, FeatureSubsetHash> visited;
  for (const auto& e : single_entries) {
    heap.push(e);
    visited.insert(e.subset);
    incumbent.offer(e);
  }

  double theta_min = 0.0;
  SearchEntry last = heap.top();
  bool stopped_by_bound = false;
  while (!heap.empty()) {
    if (budget.exhausted(result.expansions)) {
      result.budget_exhausted = true;
      break;
    }
    SearchEntry e = heap.top();
    heap.pop();
    last = e;
    if (cfg.prune && e.theta_bar + kBoundEpsilon < theta_min) {
      result.prunes = heap.size() + 1;
      result.prune_log.push_back({e.subset, e.theta, e.theta_bar, theta_min, heap.size() + 1});
      stopped_by_bound = true;
      break;
    }
    ++result.expansions;

    std::vector<SearchEntry> moves =
        score_all(scorer, neighbours(e.subset, n, cap), false, cfg.threads);
    std::erase_if(moves, [&](const SearchEntry& c) {
      return !(c.theta > e.theta) || visited.contains(c.subset);
    });
    add_bounds(scorer, moves, cfg.threads);
    for (const auto& c : moves) {
      visited.insert(c.subset);
      heap.push(c);
      incumbent.offer(c);
    }
    theta_min = cfg.literal_theta_min ? e.theta : std::max(theta_min, e.theta);
  }

  if (cfg.literal_theta_min) {
    finish(result, scorer, last, budget);
    return result;
  }

  SearchEntry chosen = incumbent.get();
  if (stopped_by_bound) {
    // An unexpanded incumbent can only remain when some bound underestimated
    // its theta; climb to a local optimum so the result keeps its guarantee.
    while (true) {
      const auto moves = score_all(scorer, neighbours(chosen.subset, n, cap), false, cfg.threads);
      const SearchEntry* step = nullptr;
      for (const auto& c : moves) {
        if (c.theta > chosen.theta && (!step || better(c, *step))) step = &c;
      }
      if (!step) break;
      chosen = *step;
      ++result.polish_moves;
    }
  }
  finish(result, scorer, chosen, budget);
  return result;
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kExact: return "exact";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kHybrid: return "hybrid";
    case Algorithm::kOracle: return "oracle";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "exact") return Algorithm::kExact;
  if (name == "greedy") return Algorithm::kGreedy;
  if (name == "hybrid") return Algorithm::kHybrid;
  if (name == "oracle") return Algorithm::kOracle;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

nlohmann::json to_json(const SelectionResult& r, const FeatureMatrix& m) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t f : r.subset) features.push_back(m.feature_names().at(f));
  return {{"algorithm", algorithm_name(r.algorithm)},
          {"features", features},
          {"indices", r.subset.indices()},
          {"theta", r.theta},
          {"evaluations", r.evaluations},
          {"prunes", r.prunes},
          {"expansions", r.expansions},
          {"runtime_ms", r.runtime_ms},
          {"budget_exhausted", r.budget_exhausted}};
}

nlohmann::json diagnostics_json(const SelectionResult& r) {
  nlohmann::json prune_log = nlohmann::json::array();
  for (const auto& p : r.prune_log) {
    prune_log.push_back({{"indices", p.subset.indices()},
                         {"theta", p.theta},
                         {"theta_bar", p.theta_bar},
                         {"theta_min", p.theta_min},
                         {"discarded", p.discarded}});
  }
  nlohmann::json out = {{"bound_pairs", r.bound_stats.pairs},
                        {"fano_violations", r.bound_stats.fano_violations},
                        {"bound_violations", r.bound_stats.bound_violations},
                        {"fano_violation_rate", r.bound_stats.fano_violation_rate()},
                        {"polish_moves", r.polish_moves},
                        {"prune_log", prune_log}};
  if (r.cardinality_cap) out["cardinality_cap"] = *r.cardinality_cap;
  return out;
}

SubsetScorer::SubsetScorer(const FeatureMatrix& m, const CvConfig& cv,
                           const Discretization& discretization)
    : accuracy_(m, cv),
      gains_(m, discretization),
      n_features_(m.n_features()),
      n_classes_(m.n_classes()) {}

double SubsetScorer::theta(const FeatureSubset& s) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = theta_memo_.find(s); it != theta_memo_.end()) return it->second;
  }
  const double value = accuracy_(s);
  std::lock_guard lock(mutex_);
  return theta_memo_.try_emplace(s, value).first->second;
}

double SubsetScorer::info_gain(const FeatureSubset& s) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = ig_memo_.find(s); it != ig_memo_.end()) return it->second;
  }
  const double value = gains_.info_gain(s);
  std::lock_guard lock(mutex_);
  return ig_memo_.try_emplace(s, value).first->second;
}

double SubsetScorer::theta_bar(const FeatureSubset& s) {
  return accuracy_upper_bound(info_gain(s), n_classes_).clamped_bound;
}

SearchEntry SubsetScorer::entry(const FeatureSubset& s) {
  return {s, theta(s), theta_bar(s)};
}

std::size_t SubsetScorer::evaluations() const {
  std::lock_guard lock(mutex_);
  return theta_memo_.size();
}

BoundStats SubsetScorer::bound_stats() const {
  std::lock_guard lock(mutex_);
  BoundStats stats;
  for (const auto& [subset, ig] : ig_memo_) {
    const auto it = theta_memo_.find(subset);
    if (it == theta_memo_.end()) continue;
    ++stats.pairs;
    if (!fano_check(it->second, ig, n_classes_)) ++stats.fano_violations;
    if (it->second > accuracy_upper_bound(ig, n_classes_).clamped_bound + kBoundEpsilon) {
      ++stats.bound_violations;
    }
  }
  return stats;
}

std::unordered_map<FeatureSubset, double, FeatureSubsetHash> SubsetScorer::theta_table() const {
  std::lock_guard lock(mutex_);
  return theta_memo_;
}

SelectionResult exact_search(const FeatureMatrix& m, const SearchConfig& cfg) {
  check_searchable(m);
  const Budget budget(cfg);
  SubsetScorer scorer(m, cfg.cv, cfg.discretization);
  const std::size_t n = m.n_features();
  SelectionResult result;
  result.algorithm = Algorithm::kExact;

  std::vector<FeatureSubset> singles;
  for (std::size_t f = 0; f < n; ++f) singles.push_back(FeatureSubset::singleton(f));
  Heap heap;
  Incumbent incumbent;
  for (const auto& e : score_all(scorer, singles, true, cfg.threads)) {
    heap.push(e);
    incumbent.offer(e);
  }

  double theta_min = 0.0;
  SearchEntry last = heap.top();
  while (!heap.empty()) {
    if (budget.exhausted(result.expansions)) {
      result.budget_exhausted = true;
      break;
    }
    SearchEntry e = heap.top();
    heap.pop();
    last = e;
    if (cfg.prune && e.theta_bar + kBoundEpsilon < theta_min) {
      result.prunes = heap.size() + 1;
      result.prune_log.push_back({e.subset, e.theta, e.theta_bar, theta_min, heap.size() + 1});
      break;
    }
    ++result.expansions;

    // Canonical prefix expansion: every subset is generated exactly once.
    std::vector<FeatureSubset> children;
    for (std::size_t f = e.subset.max_index() + 1; f < n; ++f) {
      children.push_back(e.subset.with(f));
    }
    for (const auto& c : score_all(scorer, children, true, cfg.threads)) {
      heap.push(c);
      incumbent.offer(c);
    }
    theta_min = cfg.literal_theta_min ? e.theta : std::max(theta_min, e.theta);
  }

  finish(result, scorer, cfg.literal_theta_min ? last : incumbent.get(), budget);
  return result;
}

SelectionResult greedy_search(const FeatureMatrix& m, const SearchConfig& cfg) {
  return local_search(m, cfg, std::nullopt, Algorithm::kGreedy);
}

SelectionResult capped_greedy_search(const FeatureMatrix& m, const SearchConfig& cfg,
                                     std::size_t cap) {
  return local_search(m, cfg, cap, Algorithm::kHybrid);
}

SelectionResult hybrid_search(const FeatureMatrix& m, const CardinalityModel& model,
                              const SearchConfig& cfg) {
  const Clock::time_point start = Clock::now();
  const std::size_t cap = predict_cardinality(model, m, cfg.discretization);
  SelectionResult r = capped_greedy_search(m, cfg, cap);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

SelectionResult brute_force_oracle(const FeatureMatrix& m, const SearchConfig& cfg,
                                   std::size_t max_features) {
  check_searchable(m);
  const std::size_t n = m.n_features();
  if (n > max_features) {
    throw DataError("oracle enumerates at most " + std::to_string(max_features) +
                    " features, matrix has " + std::to_string(n));
  }
  const Budget budget(cfg);
  SubsetScorer scorer(m, cfg.cv, cfg.discretization);
  std::vector<FeatureSubset> all;
  const std::uint64_t total = (std::uint64_t{1} << n) - 1;
  all.reserve(total);
  for (std::uint64_t mask = 1; mask <= total; ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t f = 0; f < n; ++f) {
      if (mask >> f & 1u) idx.push_back(f);
    }
    all.emplace_back(std::move(idx));
  }
  Incumbent incumbent;
  for (const auto& e : score_all(scorer, all, false, cfg.threads)) incumbent.offer(e);

  SelectionResult result;
  result.algorithm = Algorithm::kOracle;
  finish(result, scorer, incumbent.get(), budget);
  return result;
}

bool is_local_optimum(SubsetScorer& scorer, const FeatureSubset& subset,
                      std::optional<std::size_t> max_cardinality) {
  if (subset.empty()) throw std::invalid_argument("is_local_optimum of an empty subset");
  const double base = scorer.theta(subset);
  for (const auto& s : neighbours(subset, scorer.n_features(), max_cardinality)) {
    if (scorer.theta(s) > base) return false;
  }
  return true;
}

bool is_local_optimum(const FeatureMatrix& m, const FeatureSubset& subset, const CvConfig& cv,
                      std::optional<std::size_t> max_cardinality) {
  SubsetScorer scorer(m, cv);
  return is_local_optimum(scorer, subset, max_cardinality);
}

}  // namespace edfilter
