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

#include "edfilter/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace edfilter {
namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::vector<std::string> feature_names,
                             std::vector<Count> counts, std::vector<ClassId> labels,
                             int n_classes)
    : feature_names_(std::move(feature_names)),
      counts_(std::move(counts)),
      labels_(std::move(labels)),
      n_classes_(n_classes) {
  if (feature_names_.empty()) throw DataError("feature matrix has no features");
  if (n_classes_ < 2) {
    throw DataError("need at least 2 classes, got " + std::to_string(n_classes_));
  }
  if (counts_.size() != labels_.size() * feature_names_.size()) {
    throw DataError("count buffer does not match rows x features");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] < 0) {
      throw DataError("negative count at row " + std::to_string(i / n_features()) +
                      ", feature '" + feature_names_[i % n_features()] + "'");
    }
  }
  std::vector<bool> seen(static_cast<std::size_t>(n_classes_), false);
  for (std::size_t r = 0; r < labels_.size(); ++r) {
    const ClassId y = labels_[r];
    if (y < 0 || y >= n_classes_) {
      throw DataError("label " + std::to_string(y) + " at row " + std::to_string(r) +
                      " outside [0, " + std::to_string(n_classes_) + ")");
    }
    seen[static_cast<std::size_t>(y)] = true;
  }
  for (int c = 0; c < n_classes_; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      throw DataError("class " + std::to_string(c) + " has no rows");
    }
  }
}

FeatureMatrix FeatureMatrix::from_rows(std::vector<std::string> feature_names,
                                       const std::vector<std::vector<Count>>& rows,
                                       std::vector<ClassId> labels, int n_classes) {
  if (rows.size() != labels.size()) throw DataError("row count differs from label count");
  std::vector<Count> counts;
  counts.reserve(rows.size() * feature_names.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != feature_names.size()) {
      throw DataError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                      " entries, expected " + std::to_string(feature_names.size()));
    }
    counts.insert(counts.end(), rows[r].begin(), rows[r].end());
  }
  return FeatureMatrix(std::move(feature_names), std::move(counts), std::move(labels),
                       n_classes);
}

std::vector<Count> FeatureMatrix::column(std::size_t f) const {
  std::vector<Count> out(n_rows());
  for (std::size_t r = 0; r < n_rows(); ++r) out[r] = at(r, f);
  return out;
}

std::vector<std::size_t> FeatureMatrix::class_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n_classes_), 0);
  for (ClassId y : labels_) ++sizes[static_cast<std::size_t>(y)];
  return sizes;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Count> counts;
  counts.reserve(rows.size() * n_features());
  std::vector<ClassId> labels;
  labels.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= n_rows()) throw DataError("row index out of range");
    const auto src = row(r);
    counts.insert(counts.end(), src.begin(), src.end());
    labels.push_back(labels_[r]);
  }
  return FeatureMatrix(feature_names_, std::move(counts), std::move(labels), n_classes_);
}

FeatureMatrix FeatureMatrix::select_features(std::span<const std::size_t> features) const {
  std::vector<std::string> names;
  for (std::size_t f : features) {
    if (f >= n_features()) throw DataError("feature index out of range");
    names.push_back(feature_names_[f]);
  }
  std::vector<Count> counts;
  counts.reserve(n_rows() * features.size());
  for (std::size_t r = 0; r < n_rows(); ++r) {
    for (std::size_t f : features) counts.push_back(at(r, f));
  }
  return FeatureMatrix(std::move(names), std::move(counts), labels_, n_classes_);
}

FeatureMatrix build_counts(const std::vector<std::vector<Post>>& user_posts,
                           const KeywordMap& keywords, const std::vector<ClassId>& labels) {
  if (keywords.entries.empty()) throw DataError("keyword map is empty");
  if (labels.size() != user_posts.size()) {
    throw DataError("got " + std::to_string(labels.size()) + " labels for " +
                    std::to_string(user_posts.size()) + " users");
  }
  std::unordered_map<std::string, std::vector<std::size_t>> features_of_keyword;
  std::vector<std::string> names;
  for (std::size_t f = 0; f < keywords.entries.size(); ++f) {
    const KeywordGroup& group = keywords.entries[f];
    if (group.keywords.empty()) {
      throw DataError("feature '" + group.feature + "' has no keywords");
    }
    for (const std::string& kw : group.keywords) {
      if (kw.empty()) throw DataError("feature '" + group.feature + "' has an empty keyword");
      auto& owners = features_of_keyword[to_lower(kw)];
      // A keyword listed twice under one feature still counts once per token.
      if (owners.empty() || owners.back() != f) owners.push_back(f);
    }
    names.push_back(group.feature);
  }

  const std::size_t n_features = names.size();
  std::vector<Count> counts(user_posts.size() * n_features, 0);
  for (std::size_t u = 0; u < user_posts.size(); ++u) {
    for (const Post& post : user_posts[u]) {
      for (const std::string& token : post) {
        const auto hit = features_of_keyword.find(to_lower(token));
        if (hit == features_of_keyword.end()) continue;
        for (std::size_t f : hit->second) ++counts[u * n_features + f];
      }
    }
  }
  const int n_classes =
      labels.empty() ? 0 : 1 + *std::max_element(labels.begin(), labels.end());
  return FeatureMatrix(std::move(names), std::move(counts), labels, n_classes);
}

FeatureMatrix parse_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  auto where = [&](std::size_t col) {
    return source_name + ":" + std::to_string(line_no) + ":" + std::to_string(col + 1);
  };

  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw DataError(source_name + ": missing header row");

  const auto header = split_commas(line);
  if (header.size() < 2 || trim(header.back()) != "y") {
    throw DataError(source_name + ":" + std::to_string(line_no) +
                    ": header must list feature names followed by a final 'y' column");
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c + 1 < header.size(); ++c) {
    const auto name = trim(header[c]);
    if (name.empty()) throw DataError(where(c) + ": empty feature name in header");
    names.emplace_back(name);
  }

  const std::size_t width = header.size();
  std::vector<Count> counts;
  std::vector<ClassId> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != width) {
      throw DataError(source_name + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " cells, found " +
                      std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const auto cell = trim(cells[c]);
      Count value = 0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || end != cell.data() + cell.size()) {
        throw DataError(where(c) + ": non-integer cell '" + std::string(cell) + "'");
      }
      if (value < 0) {
        throw DataError(where(c) + ": negative " +
                        std::string(c + 1 == width ? "label" : "count") + " " +
                        std::string(cell));
      }
      if (c + 1 == width) {
        labels.push_back(static_cast<ClassId>(value));
      } else {
        counts.push_back(value);
      }
    }
  }
  if (labels.empty()) throw DataError(source_name + ": no data rows");

  const int n_classes = 1 + *std::max_element(labels.begin(), labels.end());
  if (n_classes < 2) {
    throw DataError(source_name + ": single class; need labels spanning at least 2 classes");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n_classes), false);
  for (ClassId y : labels) seen[static_cast<std::size_t>(y)] = true;
  for (int c = 0; c < n_classes; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      throw DataError(source_name + ": label gap, class " + std::to_string(c) +
                      " is absent but labels go up to " + std::to_string(n_classes - 1));
    }
  }
  return FeatureMatrix(std::move(names), std::move(counts), std::move(labels), n_classes);
}

FeatureMatrix load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_csv(in, path.string());
}

void write_csv(const FeatureMatrix& m, std::ostream& out) {
  for (const auto& name : m.feature_names()) out << name << ',';
  out << "y\n";
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    for (Count v : m.row(r)) out << v << ',';
    out << m.labels()[r] << '\n';
  }
}

void save_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(m, out);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

void SynthSpec::validate() const {
  if (n_features < 1 || n_rows < 1 || n_classes < 1 || max_count < 1) {
    throw DataError("synth: n_features, n_rows, n_classes and max_count must be positive");
  }
  if (n_informative < 0 || n_informative > n_features) {
    throw DataError("synth: n_informative must lie in [0, n_features]");
  }
  if (n_classes < 2) throw DataError("synth: n_classes must be at least 2");
  if (n_rows < n_classes) throw DataError("synth: n_rows must be at least n_classes");
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
    throw DataError("synth: noise_rate must lie in [0, 1]");
  }
}

void to_json(nlohmann::json& j, const SynthSpec& s) {
  j = nlohmann::json{{"n_features", s.n_features}, {"n_informative", s.n_informative},
                     {"n_rows", s.n_rows},         {"n_classes", s.n_classes},
                     {"noise_rate", s.noise_rate}, {"max_count", s.max_count},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, SynthSpec& s) {
  static const char* const kKnown[] = {"n_features", "n_informative", "n_rows", "n_classes",
                                       "noise_rate", "max_count",     "seed"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw DataError("synth config: unknown field '" + key + "'");
    }
  }
  SynthSpec out;
  out.n_features = j.value("n_features", out.n_features);
  out.n_informative = j.value("n_informative", out.n_informative);
  out.n_rows = j.value("n_rows", out.n_rows);
  out.n_classes = j.value("n_classes", out.n_classes);
  out.noise_rate = j.value("noise_rate", out.noise_rate);
  out.max_count = j.value("max_count", out.max_count);
  out.seed = j.value("seed", out.seed);
  s = out;
}

FeatureMatrix synth_generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  const int n_inf = spec.n_informative;
  const int n_noise = spec.n_features - n_inf;
  const int n_classes = spec.n_classes;

  // Class c's mode sits at mu_c, spread evenly across the informative block so
  // modes stay distinct even when there are fewer features than classes. The
  // extra last category absorbs trials that hit no keyword.
  const double spacing = n_classes > 1 && n_inf > 1
                             ? static_cast<double>(n_inf - 1) / (n_classes - 1)
                             : 0.0;
  const double width = std::max(0.6, 0.75 * spacing);
  std::vector<std::vector<double>> class_weights(static_cast<std::size_t>(n_classes));
  std::vector<double> mixed_weights(static_cast<std::size_t>(n_inf) + 1, 0.0);
  for (int c = 0; c < n_classes; ++c) {
    auto& w = class_weights[static_cast<std::size_t>(c)];
    const double mu = c * spacing;
    for (int j = 0; j < n_inf; ++j) {
      const double d = (j - mu) / width;
      w.push_back(1.5 * std::exp(-0.5 * d * d) + 0.05);
    }
    // With a single informative feature the class signal lives in how often
    // the keyword fires at all.
    w.push_back(n_inf == 1 ? 0.25 + 1.5 * c / (n_classes - 1) : 1.0);
    for (std::size_t j = 0; j < w.size(); ++j) mixed_weights[j] += w[j] / n_classes;
  }
  std::vector<double> noise_weights(static_cast<std::size_t>(n_noise), 0.35);
  noise_weights.push_back(1.0);

  std::vector<std::discrete_distribution<int>> class_dist;
  for (const auto& w : class_weights) class_dist.emplace_back(w.begin(), w.end());
  std::discrete_distribution<int> mixed_dist(mixed_weights.begin(), mixed_weights.end());
  std::discrete_distribution<int> noise_dist(noise_weights.begin(), noise_weights.end());
  std::bernoulli_distribution corrupt(spec.noise_rate);

  const std::size_t n_features = static_cast<std::size_t>(spec.n_features);
  std::vector<Count> counts(static_cast<std::size_t>(spec.n_rows) * n_features, 0);
  std::vector<ClassId> labels(static_cast<std::size_t>(spec.n_rows));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const ClassId y = static_cast<ClassId>(r % static_cast<std::size_t>(n_classes));
    labels[r] = y;
    Count* row = counts.data() + r * n_features;
    if (n_inf > 0) {
      auto& dist = corrupt(rng) ? mixed_dist : class_dist[static_cast<std::size_t>(y)];
      for (int t = 0; t < spec.max_count; ++t) {
        const int hit = dist(rng);
        if (hit < n_inf) ++row[hit];
      }
    }
    if (n_noise > 0) {
      for (int t = 0; t < spec.max_count; ++t) {
        const int hit = noise_dist(rng);
        if (hit < n_noise) ++row[n_inf + hit];
      }
    }
  }

  std::vector<std::string> names;
  for (int f = 0; f < spec.n_features; ++f) {
    names.push_back((f < n_inf ? "inf" : "noise") + std::to_string(f));
  }
  return FeatureMatrix(std::move(names), std::move(counts), std::move(labels), n_classes);
}

std::vector<FeatureMatrix> chunk(const FeatureMatrix& m, std::size_t chunk_size,
                                 std::uint64_t seed) {
  if (chunk_size < static_cast<std::size_t>(m.n_classes())) {
    throw DataError("chunk size " + std::to_string(chunk_size) +
                    " is smaller than the class count");
  }
  if (chunk_size > m.n_rows()) {
    throw DataError("chunk size " + std::to_string(chunk_size) + " exceeds " +
                    std::to_string(m.n_rows()) + " rows");
  }
  std::vector<std::size_t> order(m.n_rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<FeatureMatrix> chunks;
  for (std::size_t start = 0; start < order.size(); start += chunk_size) {
    const std::size_t end = std::min(order.size(), start + chunk_size);
    const std::span<const std::size_t> rows(order.data() + start, end - start);
    std::vector<bool> present(static_cast<std::size_t>(m.n_classes()), false);
    for (std::size_t r : rows) present[static_cast<std::size_t>(m.labels()[r])] = true;
    if (std::find(present.begin(), present.end(), false) != present.end()) continue;
    chunks.push_back(m.select_rows(rows));
  }
  return chunks;
}

std::vector<std::size_t> FoldAssignment::rows_in_fold(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of_row.size(); ++r) {
    if (fold_of_row[r] == fold) rows.push_back(r);
  }
  return rows;
}

FoldAssignment stratified_folds(const FeatureMatrix& m, int k, std::uint64_t seed) {
  if (k < 2) throw DataError("cross-validation needs k >= 2");
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(m.n_classes()));
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    by_class[static_cast<std::size_t>(m.labels()[r])].push_back(r);
  }
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < static_cast<std::size_t>(k)) {
      throw DataError("class " + std::to_string(c) + " has " +
                      std::to_string(by_class[c].size()) + " rows, fewer than k=" +
                      std::to_string(k));
    }
  }
  std::mt19937_64 rng(seed);
  FoldAssignment out;
  out.k = k;
  out.fold_of_row.assign(m.n_rows(), 0);
  // The round-robin cursor carries over between classes so overall fold sizes
  // stay balanced too.
  std::size_t cursor = 0;
  for (auto& rows : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t r : rows) {
      out.fold_of_row[r] = static_cast<int>(cursor % static_cast<std::size_t>(k));
      ++cursor;
    }
  }
  return out;
}

}  // namespace edfilter
