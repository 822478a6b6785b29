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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "anchors.hpp"
#include "edfilter/classifier.hpp"
#include "oracles.hpp"

namespace edfilter {
namespace {

std::vector<std::size_t> all_rows(const FeatureMatrix& m) {
  std::vector<std::size_t> rows(m.n_rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

FeatureMatrix seed7() { return synth_generate(SynthSpec{10, 3, 500, 4, 0.1, 6, 7}); }

TEST(MnbFit, SingleFeatureLikelihoodIsOne) {
  const auto m = FeatureMatrix::from_rows({"f"}, {{2}, {1}, {1}, {0}}, {0, 0, 1, 1}, 2);
  const auto model = mnb_fit(m, {0}, all_rows(m), 1.0);
  EXPECT_DOUBLE_EQ(model.log_likelihoods[0][0], 0.0);
  EXPECT_DOUBLE_EQ(model.log_likelihoods[1][0], 0.0);
}

TEST(MnbFit, HandSmoothing) {
  const auto m = FeatureMatrix::from_rows({"a", "b"}, {{3, 1}, {0, 2}}, {0, 1}, 2);
  const auto model = mnb_fit(m, {0, 1}, all_rows(m), 1.0);
  EXPECT_NEAR(std::exp(model.log_likelihoods[0][0]), 4.0 / 6.0, 1e-12);
  EXPECT_NEAR(std::exp(model.log_likelihoods[0][1]), 2.0 / 6.0, 1e-12);
}

TEST(MnbFit, BalancedPriorsAndNormalisation) {
  const auto m = seed7();
  const auto model = mnb_fit(m, {0, 1, 2, 5}, all_rows(m), 1.0);
  double prior_sum = 0.0;
  for (double lp : model.log_priors) {
    EXPECT_NEAR(std::exp(lp), 0.25, 1e-12);
    prior_sum += std::exp(lp);
  }
  EXPECT_NEAR(prior_sum, 1.0, 1e-9);
  for (const auto& row : model.log_likelihoods) {
    double s = 0.0;
    for (double l : row) s += std::exp(l);
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(MnbFit, Errors) {
  const auto m = seed7();
  EXPECT_THROW(mnb_fit(m, {0}, {}, 1.0), DataError);
  const std::vector<std::size_t> one_class{0, 4, 8};
  EXPECT_THROW(mnb_fit(m, {0}, one_class, 1.0), DataError);
}

TEST(MnbPredict, ZeroRowUsesPriors) {
  const auto m = FeatureMatrix::from_rows({"a", "b"}, {{3, 0}, {2, 1}, {0, 4}}, {0, 1, 1}, 2);
  const auto model = mnb_fit(m, {0, 1}, all_rows(m), 1.0);
  const std::vector<Count> zero{0, 0};
  EXPECT_EQ(mnb_predict(model, zero), 1);
}

TEST(MnbPredict, TiesGoToLowestClass) {
  // Two classes with identical training rows produce identical posteriors.
  const auto sym = FeatureMatrix::from_rows({"a", "b"}, {{1, 2}, {1, 2}}, {0, 1}, 2);
  const auto model = mnb_fit(sym, {0, 1}, all_rows(sym), 1.0);
  const std::vector<Count> row{1, 2};
  const auto post = mnb_log_posteriors(model, row);
  ASSERT_EQ(post[0], post[1]);
  EXPECT_EQ(mnb_predict(model, row), 0);
}

TEST(MnbPredict, MatchesIndependentPosterior) {
  const auto m = synth_generate(SynthSpec{6, 6, 400, 4, 0.0, 6, 21});
  const FeatureSubset s{0, 1, 2, 3, 4, 5};
  const auto model = mnb_fit(m, s, all_rows(m), 1.0);
  std::size_t agree = 0;
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    const auto post = mnb_log_posteriors(model, m.row(r));
    const auto pred = mnb_predict(model, m.row(r));
    EXPECT_EQ(pred, std::max_element(post.begin(), post.end()) - post.begin());
    ++agree;
  }
  const std::size_t correct = testing::ref_mnb_correct(m, s, all_rows(m), all_rows(m), 1.0);
  std::size_t lib_correct = 0;
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    if (mnb_predict(model, m.row(r)) == m.labels()[r]) ++lib_correct;
  }
  EXPECT_EQ(correct, lib_correct);
  EXPECT_EQ(agree, m.n_rows());
}

TEST(MnbPredict, DuplicateColumnActsAsDoubledCounts) {
  const auto base = synth_generate(SynthSpec{4, 4, 300, 3, 0.1, 5, 8});
  std::vector<std::vector<Count>> dup_rows;
  for (std::size_t r = 0; r < base.n_rows(); ++r) {
    std::vector<Count> row(base.row(r).begin(), base.row(r).end());
    row.push_back(row[0]);
    dup_rows.push_back(row);
  }
  std::vector<ClassId> labels(base.labels().begin(), base.labels().end());
  const auto dup = FeatureMatrix::from_rows({"a", "b", "c", "d", "a2"}, dup_rows, labels, 3);
  const auto model = mnb_fit(dup, {0, 1, 2, 3, 4}, all_rows(dup), 1.0);
  for (std::size_t c = 0; c < 3; ++c) {
    ASSERT_EQ(model.log_likelihoods[c][0], model.log_likelihoods[c][4]);
  }
  // Score the doubled-count row with the four distinct weights.
  for (std::size_t r = 0; r < dup.n_rows(); ++r) {
    int best = 0;
    double best_score = 0.0;
    for (int c = 0; c < 3; ++c) {
      double s = model.log_priors[c] + 2.0 * dup.at(r, 0) * model.log_likelihoods[c][0];
      for (std::size_t j = 1; j < 4; ++j) s += dup.at(r, j) * model.log_likelihoods[c][j];
      if (c == 0 || s > best_score) {
        best = c;
        best_score = s;
      }
    }
    ASSERT_EQ(mnb_predict(model, dup.row(r)), best) << "row " << r;
  }
}

TEST(MnbPredict, ScalingRowKeepsArgmaxWithUniformPriors) {
  const auto m = synth_generate(SynthSpec{5, 5, 400, 4, 0.1, 6, 9});
  const FeatureSubset s{0, 1, 2, 3, 4};
  const auto model = mnb_fit(m, s, all_rows(m), 1.0);
  for (std::size_t r = 0; r < 100; ++r) {
    std::vector<Count> scaled(m.row(r).begin(), m.row(r).end());
    for (auto& c : scaled) c *= 3;
    EXPECT_EQ(mnb_predict(model, m.row(r)), mnb_predict(model, scaled));
  }
}

TEST(Accuracy, SeparableIsPerfect) {
  const auto m = testing::label_copy(100, 4);
  EXPECT_EQ(accuracy(m, {0, 1}, CvConfig{}), 1.0);
}

TEST(Accuracy, ChanceLevelOnShuffledLabels) {
  auto base = synth_generate(SynthSpec{5, 5, 2000, 4, 0.0, 6, 4});
  std::vector<ClassId> labels(base.labels().begin(), base.labels().end());
  std::mt19937_64 rng(3);
  std::shuffle(labels.begin(), labels.end(), rng);
  std::vector<Count> flat;
  for (std::size_t r = 0; r < base.n_rows(); ++r) {
    flat.insert(flat.end(), base.row(r).begin(), base.row(r).end());
  }
  const FeatureMatrix m(base.feature_names(), flat, labels, 4);
  EXPECT_NEAR(accuracy(m, {0, 1, 2, 3, 4}, CvConfig{}), 0.25, 0.05);
}

TEST(Accuracy, MatchesIndependentCrossValidation) {
  const auto m = seed7();
  const CvConfig cv;
  const auto folds = stratified_folds(m, cv.k, cv.seed);
  for (const FeatureSubset& s : {FeatureSubset{0, 1, 2}, FeatureSubset{4}, FeatureSubset{0, 3, 9}}) {
    std::size_t correct = 0;
    for (int f = 0; f < cv.k; ++f) {
      std::vector<std::size_t> train;
      std::vector<std::size_t> test;
      for (std::size_t r = 0; r < m.n_rows(); ++r) {
        (folds.fold_of_row[r] == f ? test : train).push_back(r);
      }
      correct += testing::ref_mnb_correct(m, s, train, test, cv.alpha);
    }
    EXPECT_EQ(accuracy(m, s, cv), static_cast<double>(correct) / m.n_rows()) << s.to_string();
  }
}

TEST(Accuracy, Seed7InformativeAnchor) {
  const auto m = seed7();
  EXPECT_EQ(accuracy(m, {0, 1, 2}, CvConfig{}), anchors::kSeed7ThetaInformative);
}

TEST(Accuracy, DeterministicAndBounded) {
  const auto m = seed7();
  CvConfig cv;
  cv.seed = 99;
  for (const auto& s : testing::all_subsets(10)) {
    if (s.size() > 3) continue;
    const double t = accuracy(m, s, cv);
    ASSERT_GE(t, 0.0);
    ASSERT_LE(t, 1.0);
  }
  EXPECT_EQ(accuracy(m, {1, 2}, cv), accuracy(m, {1, 2}, cv));
  EXPECT_THROW(accuracy(m, FeatureSubset{}, cv), std::invalid_argument);
}

TEST(AccuracyEvaluator, BitIdenticalToReferencePath) {
  const auto m = seed7();
  for (double alpha : {1.0, 0.5}) {
    CvConfig cv;
    cv.alpha = alpha;
    const AccuracyEvaluator fast(m, cv);
    for (const auto& s : testing::all_subsets(10)) {
      ASSERT_EQ(fast(s), accuracy(m, s, cv)) << s.to_string();
    }
  }
}

}  // namespace
}  // namespace edfilter
