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

#include "edfilter/classifier.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "edfilter/simd/kernels.hpp"

namespace edfilter {
namespace {

// Shared by mnb_fit and AccuracyEvaluator so both paths round identically.
void fill_model(std::span<const std::size_t> class_sizes, std::size_t n_train,
                std::span<const Count> class_feature_counts, std::size_t stride,
                const FeatureSubset& subset, double alpha, MnbModel& model) {
  const std::size_t n_classes = class_sizes.size();
  model.alpha = alpha;
  model.log_priors.resize(n_classes);
  model.log_likelihoods.assign(n_classes, std::vector<double>(subset.size()));
  for (std::size_t c = 0; c < n_classes; ++c) {
    model.log_priors[c] = std::log(static_cast<double>(class_sizes[c]) /
                                   static_cast<double>(n_train));
    Count class_total = 0;
    for (std::size_t f : subset) class_total += class_feature_counts[c * stride + f];
    const double denom = alpha * static_cast<double>(subset.size()) +
                         static_cast<double>(class_total);
    for (std::size_t j = 0; j < subset.size(); ++j) {
      const double num =
          alpha + static_cast<double>(class_feature_counts[c * stride + subset.indices()[j]]);
      model.log_likelihoods[c][j] = std::log(num / denom);
    }
  }
}

void require_usable_subset(const FeatureSubset& subset, std::size_t n_features) {
  if (subset.empty()) throw std::invalid_argument("feature subset is empty");
  subset.check_bounds(n_features);
}

}  // namespace

void CvConfig::validate() const {
  if (k < 2) throw DataError("cross-validation needs k >= 2, got " + std::to_string(k));
  if (!(alpha > 0.0)) throw DataError("smoothing alpha must be positive");
}

MnbModel mnb_fit(const FeatureMatrix& m, const FeatureSubset& subset,
                 std::span<const std::size_t> train_rows, double alpha) {
  require_usable_subset(subset, m.n_features());
  if (!(alpha > 0.0)) throw DataError("smoothing alpha must be positive");
  if (train_rows.empty()) throw DataError("naive Bayes fit on an empty training set");

  const std::size_t n_classes = static_cast<std::size_t>(m.n_classes());
  const std::size_t n_features = m.n_features();
  std::vector<std::size_t> class_sizes(n_classes, 0);
  std::vector<Count> counts(n_classes * n_features, 0);
  for (std::size_t r : train_rows) {
    if (r >= m.n_rows()) throw DataError("training row index out of range");
    const auto c = static_cast<std::size_t>(m.labels()[r]);
    ++class_sizes[c];
    for (std::size_t f : subset) counts[c * n_features + f] += m.at(r, f);
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (class_sizes[c] == 0) {
      throw DataError("naive Bayes fit: class " + std::to_string(c) +
                      " is absent from the training rows");
    }
  }
  MnbModel model;
  model.subset = subset;
  fill_model(class_sizes, train_rows.size(), counts, n_features, subset, alpha, model);
  return model;
}

std::vector<double> mnb_log_posteriors(const MnbModel& model, std::span<const Count> row) {
  const auto& idx = model.subset.indices();
  if (!idx.empty() && idx.back() >= row.size()) {
    throw std::invalid_argument("row is shorter than the model's feature subset");
  }
  std::vector<double> scores(model.log_priors);
  for (std::size_t c = 0; c < scores.size(); ++c) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      scores[c] += model.log_likelihoods[c][j] * static_cast<double>(row[idx[j]]);
    }
  }
  return scores;
}

ClassId mnb_predict(const MnbModel& model, std::span<const Count> row) {
  const std::vector<double> scores = mnb_log_posteriors(model, row);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<ClassId>(best);
}

double accuracy(const FeatureMatrix& m, const FeatureSubset& subset, const CvConfig& cv) {
  cv.validate();
  require_usable_subset(subset, m.n_features());
  const FoldAssignment folds = stratified_folds(m, cv.k, cv.seed);
  std::size_t correct = 0;
  std::size_t total = 0;
  for (int fold = 0; fold < folds.k; ++fold) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
      (folds.fold_of_row[r] == fold ? test : train).push_back(r);
    }
    const MnbModel model = mnb_fit(m, subset, train, cv.alpha);
    for (std::size_t r : test) {
      if (mnb_predict(model, m.row(r)) == m.labels()[r]) ++correct;
      ++total;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

AccuracyEvaluator::AccuracyEvaluator(const FeatureMatrix& m, const CvConfig& cv)
    : cv_(cv),
      n_features_(m.n_features()),
      n_rows_(m.n_rows()),
      n_classes_(m.n_classes()) {
  cv_.validate();
  const FoldAssignment assignment = stratified_folds(m, cv_.k, cv_.seed);
  const std::size_t n_classes = static_cast<std::size_t>(n_classes_);
  totals_.assign(n_classes * n_features_, 0);
  class_sizes_ = m.class_sizes();
  folds_.resize(static_cast<std::size_t>(cv_.k));
  for (auto& fold : folds_) {
    fold.test_columns.assign(n_features_, {});
    fold.fold_totals.assign(n_classes * n_features_, 0);
    fold.fold_class_sizes.assign(n_classes, 0);
  }
  for (std::size_t r = 0; r < n_rows_; ++r) {
    Fold& fold = folds_[static_cast<std::size_t>(assignment.fold_of_row[r])];
    const auto c = static_cast<std::size_t>(m.labels()[r]);
    fold.test_labels.push_back(m.labels()[r]);
    ++fold.fold_class_sizes[c];
    for (std::size_t f = 0; f < n_features_; ++f) {
      const Count v = m.at(r, f);
      fold.test_columns[f].push_back(static_cast<double>(v));
      fold.fold_totals[c * n_features_ + f] += v;
      totals_[c * n_features_ + f] += v;
    }
  }
}

double AccuracyEvaluator::operator()(const FeatureSubset& subset) const {
  require_usable_subset(subset, n_features_);
  const std::size_t n_classes = static_cast<std::size_t>(n_classes_);
  const auto& kern = simd::kernels();

  std::vector<Count> train_counts(n_classes * n_features_);
  std::vector<std::size_t> train_sizes(n_classes);
  std::vector<double> scores;
  MnbModel model;
  std::size_t correct = 0;
  for (const Fold& fold : folds_) {
    const std::size_t n_test = fold.test_labels.size();
    for (std::size_t c = 0; c < n_classes; ++c) {
      train_sizes[c] = class_sizes_[c] - fold.fold_class_sizes[c];
      if (train_sizes[c] == 0) {
        throw DataError("naive Bayes fit: class " + std::to_string(c) +
                        " is absent from a training fold");
      }
      for (std::size_t f : subset) {
        const std::size_t i = c * n_features_ + f;
        train_counts[i] = totals_[i] - fold.fold_totals[i];
      }
    }
    fill_model(train_sizes, n_rows_ - n_test, train_counts, n_features_, subset, cv_.alpha,
               model);

    scores.assign(n_classes * n_test, 0.0);
    for (std::size_t c = 0; c < n_classes; ++c) {
      double* class_scores = scores.data() + c * n_test;
      std::fill(class_scores, class_scores + n_test, model.log_priors[c]);
      for (std::size_t j = 0; j < subset.size(); ++j) {
        const auto& col = fold.test_columns[subset.indices()[j]];
        kern.axpy(model.log_likelihoods[c][j], col.data(), class_scores, n_test);
      }
    }
    for (std::size_t r = 0; r < n_test; ++r) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < n_classes; ++c) {
        if (scores[c * n_test + r] > scores[best * n_test + r]) best = c;
      }
      if (static_cast<ClassId>(best) == fold.test_labels[r]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(n_rows_);
}

}  // namespace edfilter
