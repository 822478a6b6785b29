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

// Plug-in (empirical frequency) entropy, conditional entropy and information
// gain over discretised count features. All quantities are in bits.

#include <cstddef>
#include <span>
#include <vector>

#include "edfilter/dataset.hpp"
#include "edfilter/feature_subset.hpp"

namespace edfilter {

struct DiscretizedColumn {
  std::vector<int> values;
  int n_bins = 0;
};

struct Discretization {
  enum class Kind { kPresence, kEqualWidth };

  Kind kind = Kind::kPresence;
  // Bin count for kEqualWidth; kPresence always uses 3 bins {0, 1, >=2}.
  int bins = 3;

  static Discretization presence() { return {}; }
  static Discretization equal_width(int bins);

  friend bool operator==(const Discretization&, const Discretization&) = default;
};

DiscretizedColumn discretize(std::span<const Count> column,
                             const Discretization& scheme = Discretization::presence());

// H(Y); throws std::invalid_argument on empty input.
double entropy(std::span<const ClassId> labels);

// H(Y | F) for a single categorical column.
double conditional_entropy(const DiscretizedColumn& column, std::span<const ClassId> labels);

// Maps each row's tuple of codes to one dense code, numbered by first
// occurrence. A single column is returned unchanged.
DiscretizedColumn joint_encode(std::span<const DiscretizedColumn> columns);

// IG(Y; subset) = H(Y) - H(Y | joint code of the subset), clamped at zero
// against float round-off.
double info_gain(const FeatureMatrix& m, const FeatureSubset& subset,
                 const Discretization& scheme = Discretization::presence());

struct RankedFeatures {
  std::vector<std::size_t> order;
  // scores[i] is the IG of feature order[i].
  std::vector<double> scores;
};

// Singleton IG per feature, descending; ties by ascending index.
RankedFeatures rank_features(const FeatureMatrix& m,
                             const Discretization& scheme = Discretization::presence());

// Precomputed discretised columns for repeated subset IG queries.
class InfoGainTable {
 public:
  explicit InfoGainTable(const FeatureMatrix& m,
                         const Discretization& scheme = Discretization::presence());

  double label_entropy() const { return label_entropy_; }
  double info_gain(const FeatureSubset& subset) const;
  // Singleton IG in feature-index order.
  std::vector<double> singleton_gains() const;

 private:
  std::vector<DiscretizedColumn> columns_;
  std::vector<ClassId> labels_;
  int n_classes_;
  double label_entropy_;
};

}  // namespace edfilter
