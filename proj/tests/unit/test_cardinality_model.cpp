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
#include <filesystem>
#include <fstream>
#include <random>

#include "anchors.hpp"
#include "edfilter/cardinality_model.hpp"
#include "oracles.hpp"

namespace edfilter {
namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("edfilter_" + name);
}

std::vector<double> random_input(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> x(dim);
  for (auto& v : x) v = d(rng);
  return x;
}

double max_relative_gradient_error(CardinalityModel& model,
                                   const std::vector<TrainingExample>& batch) {
  const auto grad = model.gradient(batch);
  auto params = model.parameters();
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = model.loss(batch);
    params[i] = saved - h;
    const double down = model.loss(batch);
    params[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double err = std::abs(grad[i] - numeric) /
                       std::max({std::abs(grad[i]), std::abs(numeric), 1e-7});
    worst = std::max(worst, err);
  }
  return worst;
}

TEST(Encode, Layout) {
  const auto m = synth_generate(SynthSpec{10, 3, 500, 4, 0.1, 6, 7});
  const auto x = encode_input(m, 32);
  ASSERT_EQ(x.size(), input_dim_for(32));
  ASSERT_EQ(x.size(), 42u);
  const auto ranked = rank_features(m);
  for (std::size_t i = 0; i < ranked.order.size(); ++i) {
    EXPECT_EQ(x[ranked.order[i]], ranked.scores[i]);
    EXPECT_NEAR(x[ranked.order[i]], testing::ref_info_gain(m, {ranked.order[i]}), 1e-12);
  }
  for (std::size_t i = 10; i < 32; ++i) EXPECT_EQ(x[i], 0.0);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(x[32 + c], 0.25);
  for (std::size_t c = 4; c < 8; ++c) EXPECT_EQ(x[32 + c], 0.0);
  EXPECT_EQ(x[40], 10.0 / 32.0);
  EXPECT_EQ(x[41], std::log2(500.0) / 16.0);
  EXPECT_EQ(encode_input(m, 32), x);
}

TEST(Encode, ConstantFeaturesEncodeZeroGain) {
  const auto m = FeatureMatrix::from_rows({"a", "b"}, {{1, 0}, {1, 0}, {1, 0}}, {0, 1, 2}, 3);
  const auto x = encode_input(m, 8);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(x[i], 0.0);
}

TEST(Encode, Errors) {
  const auto m = synth_generate(SynthSpec{10, 3, 100, 4, 0.1, 6, 1});
  EXPECT_THROW(encode_input(m, 8), ModelError);
  const auto wide = synth_generate(SynthSpec{3, 1, 100, 9, 0.1, 6, 1});
  EXPECT_THROW(encode_input(wide, 8), ModelError);
}

TEST(Model, ShapesChain) {
  const CardinalityModel model(16, {64, 32}, 3);
  ASSERT_EQ(model.layers().size(), 3u);
  EXPECT_EQ(model.layers()[0].inputs, input_dim_for(16));
  EXPECT_EQ(model.layers()[0].outputs, 64u);
  EXPECT_EQ(model.layers()[1].inputs, 64u);
  EXPECT_EQ(model.layers()[2].outputs, 16u);
  EXPECT_EQ(model.encoding_version(), kEncodingVersion);
}

TEST(Model, SoftmaxIsProbabilityVector) {
  std::mt19937_64 rng(4);
  const CardinalityModel model(16, {64, 32}, 5);
  for (int i = 0; i < 100; ++i) {
    auto x = random_input(rng, model.input_dim());
    for (auto& v : x) v *= 20.0;
    const auto p = model.predict_proba(x);
    double sum = 0.0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
  const auto big = softmax(std::vector<double>{1000.0, 1000.0, -1000.0});
  EXPECT_NEAR(big[0], 0.5, 1e-12);
}

TEST(Model, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  for (int point = 0; point < 5; ++point) {
    CardinalityModel model(6, {8, 5}, 100 + point);
    // Fresh biases are zero, so a dead first layer leaves the next one sitting
    // on the ReLU kink; jitter every parameter off it.
    std::normal_distribution<double> jitter(0.0, 0.1);
    for (double& p : model.parameters()) p += jitter(rng);
    std::vector<TrainingExample> batch;
    for (std::size_t i = 0; i < 3; ++i) {
      batch.push_back({random_input(rng, model.input_dim()), (i * 2 + point) % 6});
    }
    EXPECT_LT(max_relative_gradient_error(model, batch), 1e-4) << "point " << point;
  }
}

TEST(Train, MemorisesSingleExample) {
  std::mt19937_64 rng(2);
  const auto x = random_input(rng, input_dim_for(8));
  std::vector<TrainingExample> examples(10, TrainingExample{x, 3});
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 8;
  cfg.shuffle = false;
  TrainSummary summary;
  const auto model = train(examples, cfg, &summary);
  ASSERT_EQ(summary.train_loss.size(), 200u);
  EXPECT_LT(summary.train_loss.back(), 0.01);
  for (std::size_t e = 1; e < summary.train_loss.size(); ++e) {
    EXPECT_LE(summary.train_loss[e], summary.train_loss[e - 1] + 1e-12) << "epoch " << e;
  }
  const std::vector<TrainingExample> one{examples.front()};
  EXPECT_LT(model.loss(one), 0.01);
}

TEST(Train, SeparableClustersReachFullValidationAccuracy) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.1);
  const std::size_t dim = input_dim_for(4);
  std::vector<TrainingExample> examples;
  for (int i = 0; i < 200; ++i) {
    const std::size_t label = i % 2;
    std::vector<double> x(dim);
    for (auto& v : x) v = noise(rng);
    x[0] += label == 0 ? 1.0 : -1.0;
    x[1] += label == 0 ? -1.0 : 1.0;
    examples.push_back({x, label});
  }
  TrainConfig cfg;
  cfg.epochs = 50;
  TrainSummary summary;
  train(examples, cfg, &summary);
  EXPECT_EQ(summary.validation_examples, 40u);
  EXPECT_EQ(summary.validation_accuracy, 1.0);
}

TEST(Train, DeterministicGivenSeed) {
  std::mt19937_64 rng(1);
  std::vector<TrainingExample> examples;
  for (int i = 0; i < 40; ++i) examples.push_back({random_input(rng, input_dim_for(5)), i % 5u});
  TrainConfig cfg;
  cfg.epochs = 5;
  const auto a = train(examples, cfg);
  const auto b = train(examples, cfg);
  EXPECT_TRUE(std::ranges::equal(a.parameters(), b.parameters()));
  cfg.seed = 2;
  const auto c = train(examples, cfg);
  EXPECT_FALSE(std::ranges::equal(a.parameters(), c.parameters()));
}

TEST(Train, RejectsBadInput) {
  TrainConfig cfg;
  std::vector<TrainingExample> one{{std::vector<double>(input_dim_for(4), 0.0), 0}};
  EXPECT_THROW(train(one, cfg), std::invalid_argument);
  std::vector<TrainingExample> bad_label(2, TrainingExample{std::vector<double>(input_dim_for(4)), 4});
  EXPECT_THROW(train(bad_label, cfg), std::invalid_argument);
  std::vector<TrainingExample> ragged{{std::vector<double>(input_dim_for(4)), 0},
                                      {std::vector<double>(input_dim_for(5)), 0}};
  EXPECT_THROW(train(ragged, cfg), std::invalid_argument);
  std::vector<TrainingExample> nan(2, TrainingExample{std::vector<double>(input_dim_for(4)), 0});
  nan[0].input[0] = std::nan("");
  EXPECT_THROW(train(nan, cfg), std::invalid_argument);
  TrainConfig zero;
  zero.validation_fraction = 1.0;
  EXPECT_THROW(zero.validate(), std::invalid_argument);
}

TEST(Train, DivergenceIsReported) {
  std::mt19937_64 rng(3);
  std::vector<TrainingExample> examples;
  for (int i = 0; i < 20; ++i) {
    auto x = random_input(rng, input_dim_for(4));
    for (auto& v : x) v *= 1e200;
    examples.push_back({x, i % 4u});
  }
  TrainConfig cfg;
  cfg.learning_rate = 1e200;
  cfg.epochs = 3;
  EXPECT_THROW(train(examples, cfg), ModelError);
}

TEST(Predict, ClampedCardinality) {
  const auto m = synth_generate(SynthSpec{5, 2, 200, 4, 0.1, 6, 2});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CardinalityModel model(32, {16, 8}, seed);
    const auto c = predict_cardinality(model, m);
    EXPECT_GE(c, 1u);
    EXPECT_LE(c, 5u);
    EXPECT_EQ(predict_cardinality(model, m), c);
  }
}

TEST(Predict, LearnsConstantCardinality) {
  std::vector<TrainingExample> examples;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto m = synth_generate(SynthSpec{8, 3, 200, 4, 0.1, 6, seed});
    examples.push_back({encode_input(m, 16), 2});
  }
  TrainConfig cfg;
  cfg.epochs = 100;
  const auto model = train(examples, cfg);
  const auto held_out = synth_generate(SynthSpec{8, 3, 200, 4, 0.1, 6, 1000});
  EXPECT_EQ(predict_cardinality(model, held_out), 3u);
}

TEST(SaveLoad, RoundTripIsExact) {
  std::mt19937_64 rng(6);
  const CardinalityModel model(12, {64, 32}, 77);
  const auto path = temp_file("model.json");
  save_model(model, path);
  const auto loaded = load_model(path);
  EXPECT_TRUE(std::ranges::equal(model.parameters(), loaded.parameters()));
  EXPECT_EQ(loaded.n_max(), 12u);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_input(rng, model.input_dim());
    EXPECT_EQ(model.predict_proba(x), loaded.predict_proba(x));
  }
  std::filesystem::remove(path);
}

TEST(SaveLoad, RejectsWrongVersionAndTruncation) {
  const CardinalityModel model(6, {4, 3}, 1);
  const auto path = temp_file("model_v.json");
  save_model(model, path);
  std::ifstream in(path);
  nlohmann::json j = nlohmann::json::parse(in);
  in.close();

  nlohmann::json wrong = j;
  wrong["encoding_version"] = kEncodingVersion + 1;
  std::ofstream(path) << wrong.dump();
  EXPECT_THROW(load_model(path), ModelError);

  const std::string text = j.dump();
  std::ofstream(path) << text.substr(0, text.size() / 2);
  EXPECT_THROW(load_model(path), ModelError);

  nlohmann::json shape = j;
  shape["layers"][1]["cols"] = 99;
  std::ofstream(path) << shape.dump();
  EXPECT_THROW(load_model(path), ModelError);

  EXPECT_THROW(load_model(temp_file("missing_model.json")), ModelError);
  std::filesystem::remove(path);
}

TEST(Predict, RejectsIncompatibleMatrix) {
  const CardinalityModel model(4, {4}, 1);
  const auto m = synth_generate(SynthSpec{6, 2, 100, 4, 0.1, 6, 1});
  EXPECT_THROW(predict_cardinality(model, m), ModelError);
}

TEST(TrainingData, OneExamplePerChunk) {
  const auto m = synth_generate(SynthSpec{6, 3, 1000, 4, 0.1, 6, 7});
  std::vector<ChunkLabel> labels;
  const auto examples = gen_training_data(m, 200, 1, Labeler::kAuto, SearchConfig{}, 32, &labels);
  ASSERT_EQ(examples.size(), 5u);
  ASSERT_EQ(labels.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(examples[i].label + 1, labels[i].optimum.size());
    EXPECT_EQ(examples[i].input.size(), input_dim_for(32));
  }
  EXPECT_THROW(gen_training_data(m, 10, 1, Labeler::kAuto, SearchConfig{}, 32), DataError);
}

TEST(TrainingData, LabelCopyChunksUseSmallestPerfectSubset) {
  // A one-feature naive Bayes model only sees the priors, so the copy column
  // needs one companion column; the oracle picks the smallest such pair.
  const auto m = testing::label_copy(400, 2, 3);
  std::vector<ChunkLabel> labels;
  const auto examples = gen_training_data(m, 100, 3, Labeler::kOracle, SearchConfig{}, 8, &labels);
  ASSERT_EQ(examples.size(), 4u);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    EXPECT_EQ(examples[i].label, 1u);
    EXPECT_EQ(labels[i].theta, 1.0);
    EXPECT_TRUE(labels[i].optimum.contains(0));
  }
}

TEST(TrainingData, Seed7LabelsAreAnchored) {
  const auto m = synth_generate(SynthSpec{10, 3, 500, 4, 0.1, 6, 7});
  const auto oracle = gen_training_data(m, 100, 7, Labeler::kOracle, SearchConfig{}, 32);
  const auto exact = gen_training_data(m, 100, 7, Labeler::kExact, SearchConfig{}, 32);
  std::vector<std::size_t> cardinalities;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    cardinalities.push_back(oracle[i].label + 1);
    EXPECT_EQ(oracle[i].label, exact[i].label);
    EXPECT_EQ(oracle[i].input, exact[i].input);
  }
  EXPECT_EQ(cardinalities, anchors::kSeed7ChunkCardinalities);
}

}  // namespace
}  // namespace edfilter
