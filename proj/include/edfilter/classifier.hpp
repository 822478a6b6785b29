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

// Multinomial naive Bayes wrapper evaluator: the pooled cross-validated
// accuracy that scores every candidate feature subset.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "edfilter/dataset.hpp"
#include "edfilter/feature_subset.hpp"

namespace edfilter {

inline constexpr std::uint64_t kDefaultCvSeed = 20240917;

struct CvConfig {
  int k = 5;
  std::uint64_t seed = kDefaultCvSeed;
  double alpha = 1.0;

  // Throws DataError unless k >= 2 and alpha > 0.
  void validate() const;

  friend bool operator==(const CvConfig&, const CvConfig&) = default;
};

struct MnbModel {
  std::vector<double> log_priors;
  // log_likelihoods[c][j] belongs to feature subset.indices()[j].
  std::vector<std::vector<double>> log_likelihoods;
  double alpha = 1.0;
  FeatureSubset subset;

  int n_classes() const { return static_cast<int>(log_priors.size()); }
};

// log P(c) = log(N_c / N);
// log P(i | c) = log((alpha + N_ci) / (alpha |S| + sum_{j in S} N_cj)).
// Throws DataError when the training rows are empty or miss any class.
MnbModel mnb_fit(const FeatureMatrix& m, const FeatureSubset& subset,
                 std::span<const std::size_t> train_rows, double alpha);

// Per-class log posterior up to a constant, accumulated in subset order.
std::vector<double> mnb_log_posteriors(const MnbModel& model, std::span<const Count> row);

// Argmax of the log posterior; ties go to the lowest class id.
ClassId mnb_predict(const MnbModel& model, std::span<const Count> row);

// Stratified k-fold accuracy, correct predictions over all predictions pooled
// across folds. Reference path built on mnb_fit / mnb_predict.
double accuracy(const FeatureMatrix& m, const FeatureSubset& subset, const CvConfig& cv);

// Fast cross-validated accuracy for many subsets of one matrix. Fold splits,
// class-feature count totals and column-major test blocks are built once; each
// query is then O(|S| * (classes + test rows)). Results are bit-identical to
// accuracy(). Const member functions are safe to call concurrently.
class AccuracyEvaluator {
 public:
  AccuracyEvaluator(const FeatureMatrix& m, const CvConfig& cv);

  double operator()(const FeatureSubset& subset) const;

  const CvConfig& cv() const { return cv_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_rows() const { return n_rows_; }

 private:
  struct Fold {
    std::vector<ClassId> test_labels;
    // test_columns[f] holds feature f over this fold's test rows.
    std::vector<std::vector<double>> test_columns;
    // fold_totals[c * n_features + f]
    std::vector<Count> fold_totals;
    std::vector<std::size_t> fold_class_sizes;
  };

  CvConfig cv_;
  std::size_t n_features_;
  std::size_t n_rows_;
  int n_classes_;
  std::vector<Count> totals_;
  std::vector<std::size_t> class_sizes_;
  std::vector<Fold> folds_;
};

}  // namespace edfilter
