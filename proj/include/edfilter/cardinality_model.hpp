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

// Feature-cardinality detector: a two-hidden-layer ReLU perceptron with a
// softmax output over cardinalities 1..n_max, trained with Adam on chunk-level
// examples labelled by the optimal subset size.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "edfilter/dataset.hpp"
#include "edfilter/info_theory.hpp"
#include "edfilter/search.hpp"

namespace edfilter {

// Incompatible, corrupt or diverged model.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kEncodingVersion = 1;
inline constexpr std::size_t kDefaultNMax = 32;
inline constexpr std::size_t kHistogramSlots = 8;
inline constexpr std::size_t kSummarySlots = 2;

inline constexpr std::size_t input_dim_for(std::size_t n_max) {
  return n_max + kHistogramSlots + kSummarySlots;
}

// [singleton IG per feature in index order, zero padded to n_max]
// ++ [class frequencies, zero padded to 8 slots]
// ++ [n_features / n_max, log2(n_rows) / 16]
std::vector<double> encode_input(const FeatureMatrix& m, std::size_t n_max = kDefaultNMax,
                                 const Discretization& scheme = Discretization::presence());

struct TrainingExample {
  std::vector<double> input;
  // Optimal cardinality minus one.
  std::size_t label = 0;
};

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  double validation_fraction = 0.2;
  std::vector<std::size_t> hidden = {64, 32};
  // Reshuffle the training split every epoch.
  bool shuffle = true;

  void validate() const;
};

struct TrainSummary {
  std::size_t train_examples = 0;
  std::size_t validation_examples = 0;
  std::size_t best_epoch = 0;
  double best_validation_loss = 0.0;
  double validation_accuracy = 0.0;
  // Mean training loss measured at the end of each epoch.
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
};

class CardinalityModel {
 public:
  struct Layer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    // Weight (out j, in k) lives at weight_offset + k * outputs + j so the
    // forward pass is a sequence of axpy calls over outputs.
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
  };

  // He-initialised weights from seed, zero biases.
  CardinalityModel(std::size_t n_max, const std::vector<std::size_t>& hidden, std::uint64_t seed);

  std::size_t n_max() const { return n_max_; }
  std::size_t input_dim() const { return input_dim_for(n_max_); }
  int encoding_version() const { return encoding_version_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  double weight(std::size_t layer, std::size_t out, std::size_t in) const;

  std::vector<double> logits(std::span<const double> input) const;
  std::vector<double> predict_proba(std::span<const double> input) const;

  // Mean cross-entropy over the batch.
  double loss(std::span<const TrainingExample> batch) const;
  // d loss / d parameters; also returns the loss through *loss when given.
  std::vector<double> gradient(std::span<const TrainingExample> batch,
                               double* loss = nullptr) const;

  friend nlohmann::json model_to_json(const CardinalityModel& model);
  friend CardinalityModel model_from_json(const nlohmann::json& j);

 private:
  CardinalityModel() = default;
  void layout(const std::vector<std::size_t>& widths);

  std::size_t n_max_ = 0;
  int encoding_version_ = kEncodingVersion;
  std::vector<Layer> layers_;
  std::vector<double> params_;
};

std::vector<double> softmax(std::span<const double> logits);

// Returns the parameters of the epoch with the lowest validation loss. Throws
// ModelError when the loss becomes NaN and std::invalid_argument on bad input.
CardinalityModel train(const std::vector<TrainingExample>& examples, const TrainConfig& cfg,
                       TrainSummary* summary = nullptr);

// 1 + argmax of the softmax, clamped to [1, n_features]; ties to smaller c.
std::size_t predict_cardinality(const CardinalityModel& model, const FeatureMatrix& m,
                                const Discretization& scheme = Discretization::presence());

enum class Labeler { kAuto, kOracle, kExact };

struct ChunkLabel {
  std::size_t rows = 0;
  FeatureSubset optimum;
  double theta = 0.0;
  bool budget_exhausted = false;
};

// One example per kept chunk, labelled by the oracle (at most 12 features) or
// exact search; kAuto picks the oracle whenever it applies. Chunks where a
// class has fewer than search.cv.k rows are skipped.
std::vector<TrainingExample> gen_training_data(const FeatureMatrix& m, std::size_t chunk_size,
                                               std::uint64_t seed, Labeler labeler,
                                               const SearchConfig& search,
                                               std::size_t n_max = kDefaultNMax,
                                               std::vector<ChunkLabel>* labels = nullptr);

nlohmann::json model_to_json(const CardinalityModel& model);
// Throws ModelError on a version mismatch or malformed content.
CardinalityModel model_from_json(const nlohmann::json& j);
void save_model(const CardinalityModel& model, const std::filesystem::path& path);
CardinalityModel load_model(const std::filesystem::path& path);

}  // namespace edfilter
