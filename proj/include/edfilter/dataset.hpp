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

// Keyword-count classification data: construction from tokenised posts,
// CSV ingestion, the synthetic generator, chunking and stratified folds.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace edfilter {

// Malformed or contract-violating input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Count = std::int64_t;
using ClassId = int;

// Immutable matrix of non-negative keyword counts, one class label per row.
// Every class id in [0, n_classes) occurs at least once and n_classes >= 2.
class FeatureMatrix {
 public:
  // Row-major counts; throws DataError when an invariant does not hold.
  FeatureMatrix(std::vector<std::string> feature_names, std::vector<Count> counts,
                std::vector<ClassId> labels, int n_classes);

  static FeatureMatrix from_rows(std::vector<std::string> feature_names,
                                 const std::vector<std::vector<Count>>& rows,
                                 std::vector<ClassId> labels, int n_classes);

  std::size_t n_rows() const { return labels_.size(); }
  std::size_t n_features() const { return feature_names_.size(); }
  int n_classes() const { return n_classes_; }

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::span<const ClassId> labels() const { return labels_; }
  std::span<const Count> row(std::size_t r) const {
    return {counts_.data() + r * n_features(), n_features()};
  }
  Count at(std::size_t r, std::size_t f) const { return counts_[r * n_features() + f]; }

  std::vector<Count> column(std::size_t f) const;
  std::vector<std::size_t> class_sizes() const;

  // Rows in the given order. Throws DataError if a class would be missing.
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  // Columns in the given order, all rows kept.
  FeatureMatrix select_features(std::span<const std::size_t> features) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::vector<std::string> feature_names_;
  std::vector<Count> counts_;
  std::vector<ClassId> labels_;
  int n_classes_;
};

struct KeywordGroup {
  std::string feature;
  std::vector<std::string> keywords;
};

// Ordered feature -> keywords mapping; feature order is column order.
struct KeywordMap {
  std::vector<KeywordGroup> entries;
};

using Post = std::vector<std::string>;

// Cell (u, i) is the number of tokens across user u's posts that equal, case
// insensitively, one of feature i's keywords.
FeatureMatrix build_counts(const std::vector<std::vector<Post>>& user_posts,
                           const KeywordMap& keywords,
                           const std::vector<ClassId>& labels);

FeatureMatrix load_csv(const std::filesystem::path& path);
FeatureMatrix parse_csv(std::istream& in, const std::string& source_name = "<stream>");
void save_csv(const FeatureMatrix& m, const std::filesystem::path& path);
void write_csv(const FeatureMatrix& m, std::ostream& out);

struct SynthSpec {
  int n_features = 10;
  int n_informative = 3;
  int n_rows = 500;
  int n_classes = 4;
  double noise_rate = 0.1;
  int max_count = 6;
  std::uint64_t seed = 0;

  // Throws DataError on an invalid combination.
  void validate() const;
};

void to_json(nlohmann::json& j, const SynthSpec& s);
void from_json(const nlohmann::json& j, SynthSpec& s);

// Informative features (the first n_informative columns) follow a
// class-conditional multinomial whose mode moves across the informative block
// with the class; the rest are class-independent. With probability noise_rate
// a row's informative block is drawn from the class-averaged distribution.
// Rows cycle through the classes so every class is present.
FeatureMatrix synth_generate(const SynthSpec& spec);

// Seeded shuffle split into consecutive chunks of chunk_size rows; a trailing
// short chunk is kept, and any chunk missing a class is discarded.
std::vector<FeatureMatrix> chunk(const FeatureMatrix& m, std::size_t chunk_size,
                                 std::uint64_t seed);

struct FoldAssignment {
  std::vector<int> fold_of_row;
  int k = 0;

  std::vector<std::size_t> rows_in_fold(int fold) const;
};

// Stratified: within each class, fold sizes differ by at most one.
FoldAssignment stratified_folds(const FeatureMatrix& m, int k, std::uint64_t seed);

}  // namespace edfilter
