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

// Straightforward reference implementations used to cross-check the library.
// They share no code with it beyond the data container.
#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "edfilter/dataset.hpp"
#include "edfilter/feature_subset.hpp"

namespace edfilter::testing {

inline int presence_bin(Count c) { return c == 0 ? 0 : (c == 1 ? 1 : 2); }

inline double ref_entropy(const std::vector<int>& labels) {
  std::map<int, double> freq;
  for (int y : labels) freq[y] += 1.0;
  double h = 0.0;
  for (const auto& [y, n] : freq) {
    const double p = n / labels.size();
    h -= p * std::log2(p);
  }
  return h;
}

// H(Y) - H(Y|F) from the joint histogram of presence-binned tuples.
inline double ref_info_gain(const FeatureMatrix& m, const FeatureSubset& s) {
  std::vector<int> labels(m.labels().begin(), m.labels().end());
  std::map<std::vector<int>, std::map<int, double>> joint;
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    std::vector<int> key;
    for (std::size_t f : s) key.push_back(presence_bin(m.at(r, f)));
    joint[key][labels[r]] += 1.0;
  }
  const double n = static_cast<double>(m.n_rows());
  double cond = 0.0;
  for (const auto& [key, by_class] : joint) {
    double cell = 0.0;
    for (const auto& [y, c] : by_class) cell += c;
    for (const auto& [y, c] : by_class) {
      const double p_y_given_f = c / cell;
      cond -= (cell / n) * p_y_given_f * std::log2(p_y_given_f);
    }
  }
  return ref_entropy(labels) - cond;
}

// Multinomial naive Bayes trained on train_rows, scored on test_rows; returns
// the number of correct predictions.
inline std::size_t ref_mnb_correct(const FeatureMatrix& m, const FeatureSubset& s,
                                   const std::vector<std::size_t>& train_rows,
                                   const std::vector<std::size_t>& test_rows, double alpha) {
  const int C = m.n_classes();
  std::vector<double> prior(C, 0.0);
  std::vector<std::map<std::size_t, double>> sums(C);
  std::vector<double> totals(C, 0.0);
  for (std::size_t r : train_rows) {
    const int y = m.labels()[r];
    prior[y] += 1.0;
    for (std::size_t f : s) {
      sums[y][f] += static_cast<double>(m.at(r, f));
      totals[y] += static_cast<double>(m.at(r, f));
    }
  }
  std::size_t correct = 0;
  for (std::size_t r : test_rows) {
    int best = -1;
    double best_score = 0.0;
    for (int c = 0; c < C; ++c) {
      double score = std::log(prior[c] / train_rows.size());
      for (std::size_t f : s) {
        const double p = (alpha + sums[c][f]) / (alpha * s.size() + totals[c]);
        score += static_cast<double>(m.at(r, f)) * std::log(p);
      }
      if (best < 0 || score > best_score) {
        best = c;
        best_score = score;
      }
    }
    if (best == m.labels()[r]) ++correct;
  }
  return correct;
}

// All non-empty subsets of n features.
inline std::vector<FeatureSubset> all_subsets(std::size_t n) {
  std::vector<FeatureSubset> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t f = 0; f < n; ++f) {
      if (mask >> f & 1) idx.push_back(f);
    }
    out.emplace_back(idx);
  }
  return out;
}

inline FeatureMatrix table1() {
  std::vector<std::string> names;
  for (int i = 1; i <= 15; ++i) names.push_back("f" + std::to_string(i));
  return FeatureMatrix::from_rows(
      names,
      {{1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
       {0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0},
       {26, 22, 0, 0, 25, 0, 0, 3, 0, 0, 0, 0, 29, 0, 0},
       {1, 39, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
      {0, 1, 2, 3}, 4);
}

// Feature 0 equals the label and feature 1 mirrors it (n_classes - 1 - y), so
// the classes are separable for multinomial NB; the rest are constant zero.
inline FeatureMatrix label_copy(std::size_t rows, int classes, std::size_t extra = 2) {
  std::vector<std::string> names{"copy", "mirror"};
  for (std::size_t i = 0; i < extra; ++i) names.push_back("zero" + std::to_string(i));
  std::vector<std::vector<Count>> data;
  std::vector<ClassId> labels;
  for (std::size_t r = 0; r < rows; ++r) {
    const int y = static_cast<int>(r % classes);
    std::vector<Count> row(names.size(), 0);
    row[0] = y;
    row[1] = classes - 1 - y;
    data.push_back(row);
    labels.push_back(y);
  }
  return FeatureMatrix::from_rows(names, data, labels, classes);
}

}  // namespace edfilter::testing
