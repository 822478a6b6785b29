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

#include "edfilter/cardinality_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "edfilter/simd/kernels.hpp"

namespace edfilter {
namespace {

// Layer inputs per example: acts[0] is the encoded input, acts[l + 1] the
// output of layer l (ReLU applied for hidden layers, raw logits for the last).
using Activations = std::vector<std::vector<double>>;

void forward(const CardinalityModel& model, std::span<const double> input, Activations& acts) {
  const auto& kern = simd::kernels();
  const auto params = model.parameters();
  const auto& layers = model.layers();
  acts.resize(layers.size() + 1);
  acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    auto& out = acts[l + 1];
    out.assign(params.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset),
               params.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset + layer.outputs));
    const auto& in = acts[l];
    for (std::size_t k = 0; k < layer.inputs; ++k) {
      kern.axpy(in[k], params.data() + layer.weight_offset + k * layer.outputs, out.data(),
                layer.outputs);
    }
    if (l + 1 < layers.size()) kern.relu(out.data(), out.size());
  }
}

double log_sum_exp(std::span<const double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - top);
  return top + std::log(sum);
}

void check_example(const TrainingExample& e, std::size_t input_dim, std::size_t n_max) {
  if (e.input.size() != input_dim) {
    throw std::invalid_argument("training example has input length " +
                                std::to_string(e.input.size()) + ", expected " +
                                std::to_string(input_dim));
  }
  if (e.label >= n_max) {
    throw std::invalid_argument("training label " + std::to_string(e.label) +
                                " outside [0, " + std::to_string(n_max) + ")");
  }
  for (double v : e.input) {
    if (!std::isfinite(v)) throw std::invalid_argument("training input is not finite");
  }
}

double mean_loss(const CardinalityModel& model, const std::vector<TrainingExample>& examples,
                 std::span<const std::size_t> idx) {
  double total = 0.0;
  for (std::size_t i : idx) {
    const auto z = model.logits(examples[i].input);
    total += log_sum_exp(z) - z[examples[i].label];
  }
  return total / static_cast<double>(idx.size());
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs == 0 || batch_size == 0) throw std::invalid_argument("epochs and batch size must be positive");
  if (!(learning_rate > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("learning rate and epsilon must be positive");
  }
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in (0, 1)");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("validation fraction must lie in (0, 1)");
  }
  if (hidden.empty() || std::find(hidden.begin(), hidden.end(), 0u) != hidden.end()) {
    throw std::invalid_argument("hidden layer sizes must be positive");
  }
}

std::vector<double> encode_input(const FeatureMatrix& m, std::size_t n_max,
                                 const Discretization& scheme) {
  if (m.n_features() > n_max) {
    throw ModelError("matrix has " + std::to_string(m.n_features()) +
                     " features, the model supports at most " + std::to_string(n_max));
  }
  if (static_cast<std::size_t>(m.n_classes()) > kHistogramSlots) {
    throw ModelError("matrix has " + std::to_string(m.n_classes()) +
                     " classes, the encoding supports at most " +
                     std::to_string(kHistogramSlots));
  }
  std::vector<double> out(input_dim_for(n_max), 0.0);
  const auto gains = InfoGainTable(m, scheme).singleton_gains();
  std::copy(gains.begin(), gains.end(), out.begin());
  const auto sizes = m.class_sizes();
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    out[n_max + c] = static_cast<double>(sizes[c]) / static_cast<double>(m.n_rows());
  }
  out[n_max + kHistogramSlots] =
      static_cast<double>(m.n_features()) / static_cast<double>(n_max);
  out[n_max + kHistogramSlots + 1] = std::log2(static_cast<double>(m.n_rows())) / 16.0;
  return out;
}

CardinalityModel::CardinalityModel(std::size_t n_max, const std::vector<std::size_t>& hidden,
                                   std::uint64_t seed)
    : n_max_(n_max) {
  if (n_max == 0) throw std::invalid_argument("n_max must be positive");
  std::vector<std::size_t> widths{input_dim_for(n_max)};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(n_max);
  layout(widths);
  std::mt19937_64 rng(seed);
  for (const auto& layer : layers_) {
    std::normal_distribution<double> init(0.0, std::sqrt(2.0 / static_cast<double>(layer.inputs)));
    for (std::size_t i = 0; i < layer.inputs * layer.outputs; ++i) {
      params_[layer.weight_offset + i] = init(rng);
    }
  }
}

void CardinalityModel::layout(const std::vector<std::size_t>& widths) {
  layers_.clear();
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer;
    layer.inputs = widths[l];
    layer.outputs = widths[l + 1];
    layer.weight_offset = offset;
    offset += layer.inputs * layer.outputs;
    layer.bias_offset = offset;
    offset += layer.outputs;
    layers_.push_back(layer);
  }
  params_.assign(offset, 0.0);
}

double CardinalityModel::weight(std::size_t layer, std::size_t out, std::size_t in) const {
  const Layer& l = layers_.at(layer);
  return params_[l.weight_offset + in * l.outputs + out];
}

std::vector<double> CardinalityModel::logits(std::span<const double> input) const {
  if (input.size() != input_dim()) {
    throw ModelError("model expects input length " + std::to_string(input_dim()) + ", got " +
                     std::to_string(input.size()));
  }
  Activations acts;
  forward(*this, input, acts);
  return std::move(acts.back());
}

std::vector<double> softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<double> CardinalityModel::predict_proba(std::span<const double> input) const {
  return softmax(logits(input));
}

double CardinalityModel::loss(std::span<const TrainingExample> batch) const {
  double total = 0.0;
  for (const auto& e : batch) {
    const auto z = logits(e.input);
    total += log_sum_exp(z) - z.at(e.label);
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> CardinalityModel::gradient(std::span<const TrainingExample> batch,
                                               double* loss_out) const {
  const auto& kern = simd::kernels();
  std::vector<double> grad(params_.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  Activations acts;
  std::vector<double> delta;
  std::vector<double> delta_prev;
  for (const auto& e : batch) {
    if (e.input.size() != input_dim()) throw ModelError("gradient: input length mismatch");
    forward(*this, e.input, acts);
    const auto& z = acts.back();
    total += log_sum_exp(z) - z.at(e.label);
    delta = softmax(z);
    delta[e.label] -= 1.0;
    for (double& d : delta) d *= scale;

    for (std::size_t l = layers_.size(); l-- > 0;) {
      const Layer& layer = layers_[l];
      const auto& in = acts[l];
      for (std::size_t k = 0; k < layer.inputs; ++k) {
        kern.axpy(in[k], delta.data(), grad.data() + layer.weight_offset + k * layer.outputs,
                  layer.outputs);
      }
      kern.axpy(1.0, delta.data(), grad.data() + layer.bias_offset, layer.outputs);
      if (l == 0) break;
      delta_prev.assign(layer.inputs, 0.0);
      for (std::size_t k = 0; k < layer.inputs; ++k) {
        if (in[k] > 0.0) {
          delta_prev[k] =
              kern.dot(params_.data() + layer.weight_offset + k * layer.outputs, delta.data(),
                       layer.outputs);
        }
      }
      delta.swap(delta_prev);
    }
  }
  if (loss_out) *loss_out = total * scale;
  return grad;
}

CardinalityModel train(const std::vector<TrainingExample>& examples, const TrainConfig& cfg,
                       TrainSummary* summary) {
  cfg.validate();
  if (examples.size() < 2) throw std::invalid_argument("training needs at least 2 examples");
  const std::size_t input_dim = examples.front().input.size();
  if (input_dim <= kHistogramSlots + kSummarySlots) {
    throw std::invalid_argument("training inputs are too short for the cardinality encoding");
  }
  const std::size_t n_max = input_dim - kHistogramSlots - kSummarySlots;
  for (const auto& e : examples) check_example(e, input_dim, n_max);

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto wanted =
      static_cast<std::size_t>(std::llround(cfg.validation_fraction * examples.size()));
  const std::size_t n_val = std::clamp<std::size_t>(wanted, 1, examples.size() - 1);
  const std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
  std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());
  if (!cfg.shuffle) std::sort(train_idx.begin(), train_idx.end());

  CardinalityModel model(n_max, cfg.hidden, cfg.seed);
  const std::size_t n_params = model.parameters().size();
  std::vector<double> m(n_params, 0.0);
  std::vector<double> v(n_params, 0.0);
  std::vector<double> best_params(model.parameters().begin(), model.parameters().end());
  double best_val = std::numeric_limits<double>::infinity();
  TrainSummary local;
  local.train_examples = train_idx.size();
  local.validation_examples = n_val;

  std::size_t step = 0;
  std::vector<TrainingExample> batch;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(train_idx.begin(), train_idx.end(), rng);
    for (std::size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(train_idx.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(examples[train_idx[i]]);
      const std::vector<double> grad = model.gradient(batch);
      ++step;
      const simd::AdamStep adam{cfg.learning_rate,
                                cfg.beta1,
                                cfg.beta2,
                                cfg.epsilon,
                                1.0 - std::pow(cfg.beta1, static_cast<double>(step)),
                                1.0 - std::pow(cfg.beta2, static_cast<double>(step))};
      simd::adam_update(model.parameters(), grad, m, v, adam);
    }
    const double train_loss = mean_loss(model, examples, train_idx);
    const double val_loss = mean_loss(model, examples, val_idx);
    if (std::isnan(train_loss) || std::isnan(val_loss)) {
      throw ModelError("training diverged: NaN loss at epoch " + std::to_string(epoch + 1));
    }
    local.train_loss.push_back(train_loss);
    local.validation_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      local.best_epoch = epoch + 1;
      std::copy(model.parameters().begin(), model.parameters().end(), best_params.begin());
    }
  }
  std::copy(best_params.begin(), best_params.end(), model.parameters().begin());
  local.best_validation_loss = best_val;
  std::size_t hits = 0;
  for (std::size_t i : val_idx) {
    if (argmax(model.logits(examples[i].input)) == examples[i].label) ++hits;
  }
  local.validation_accuracy = static_cast<double>(hits) / static_cast<double>(n_val);
  if (summary) *summary = std::move(local);
  return model;
}

std::size_t predict_cardinality(const CardinalityModel& model, const FeatureMatrix& m,
                                const Discretization& scheme) {
  if (model.encoding_version() != kEncodingVersion) {
    throw ModelError("model encoding version " + std::to_string(model.encoding_version()) +
                     " differs from " + std::to_string(kEncodingVersion));
  }
  const auto p = model.predict_proba(encode_input(m, model.n_max(), scheme));
  const std::size_t c = argmax(p) + 1;
  return std::clamp<std::size_t>(c, 1, m.n_features());
}

std::vector<TrainingExample> gen_training_data(const FeatureMatrix& m, std::size_t chunk_size,
                                               std::uint64_t seed, Labeler labeler,
                                               const SearchConfig& search, std::size_t n_max,
                                               std::vector<ChunkLabel>* labels) {
  search.cv.validate();
  const std::size_t k = static_cast<std::size_t>(search.cv.k);
  if (chunk_size < k * static_cast<std::size_t>(m.n_classes())) {
    throw DataError("chunk size " + std::to_string(chunk_size) + " is too small for " +
                    std::to_string(k) + "-fold cross-validation over " +
                    std::to_string(m.n_classes()) + " classes");
  }
  if (labeler == Labeler::kAuto) {
    labeler = m.n_features() <= kOracleMaxFeatures ? Labeler::kOracle : Labeler::kExact;
  }
  std::vector<TrainingExample> out;
  for (const FeatureMatrix& part : chunk(m, chunk_size, seed)) {
    const auto sizes = part.class_sizes();
    if (std::any_of(sizes.begin(), sizes.end(), [&](std::size_t s) { return s < k; })) continue;
    const SelectionResult best = labeler == Labeler::kOracle ? brute_force_oracle(part, search)
                                                              : exact_search(part, search);
    out.push_back({encode_input(part, n_max, search.discretization), best.subset.size() - 1});
    if (labels) labels->push_back({part.n_rows(), best.subset, best.theta, best.budget_exhausted});
  }
  return out;
}

nlohmann::json model_to_json(const CardinalityModel& model) {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < model.layers_.size(); ++l) {
    const auto& layer = model.layers_[l];
    std::vector<double> weights;
    weights.reserve(layer.inputs * layer.outputs);
    for (std::size_t j = 0; j < layer.outputs; ++j) {
      for (std::size_t k = 0; k < layer.inputs; ++k) weights.push_back(model.weight(l, j, k));
    }
    const auto bias_begin = model.params_.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset);
    layers.push_back({{"rows", layer.outputs},
                      {"cols", layer.inputs},
                      {"weights", weights},
                      {"bias", std::vector<double>(bias_begin, bias_begin + static_cast<std::ptrdiff_t>(layer.outputs))}});
  }
  return {{"encoding_version", model.encoding_version_},
          {"n_max", model.n_max_},
          {"input_dim", model.input_dim()},
          {"layers", layers}};
}

CardinalityModel model_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("encoding_version").get<int>();
    if (version != kEncodingVersion) {
      throw ModelError("model file has encoding_version " + std::to_string(version) +
                       ", this build reads version " + std::to_string(kEncodingVersion));
    }
    CardinalityModel model;
    model.n_max_ = j.at("n_max").get<std::size_t>();
    const std::size_t input_dim = j.at("input_dim").get<std::size_t>();
    if (model.n_max_ == 0 || input_dim != input_dim_for(model.n_max_)) {
      throw ModelError("model input_dim " + std::to_string(input_dim) +
                       " does not match n_max " + std::to_string(model.n_max_));
    }
    const auto& layers = j.at("layers");
    if (!layers.is_array() || layers.size() < 2) throw ModelError("model needs at least 2 layers");
    std::vector<std::size_t> widths{input_dim};
    for (const auto& layer : layers) {
      if (layer.at("cols").get<std::size_t>() != widths.back()) {
        throw ModelError("model layer shapes do not chain");
      }
      widths.push_back(layer.at("rows").get<std::size_t>());
    }
    if (widths.back() != model.n_max_) throw ModelError("model output width differs from n_max");
    model.layout(widths);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto weights = layers[l].at("weights").get<std::vector<double>>();
      const auto bias = layers[l].at("bias").get<std::vector<double>>();
      const auto& shape = model.layers_[l];
      if (weights.size() != shape.inputs * shape.outputs || bias.size() != shape.outputs) {
        throw ModelError("model layer " + std::to_string(l) + " has the wrong number of values");
      }
      for (std::size_t jr = 0; jr < shape.outputs; ++jr) {
        for (std::size_t k = 0; k < shape.inputs; ++k) {
          model.params_[shape.weight_offset + k * shape.outputs + jr] =
              weights[jr * shape.inputs + k];
        }
      }
      std::copy(bias.begin(), bias.end(),
                model.params_.begin() + static_cast<std::ptrdiff_t>(shape.bias_offset));
    }
    if (!std::all_of(model.params_.begin(), model.params_.end(),
                     [](double x) { return std::isfinite(x); })) {
      throw ModelError("model contains non-finite values");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const CardinalityModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write '" + path.string() + "'");
  out << model_to_json(model).dump() << '\n';
  if (!out) throw ModelError("write failed for '" + path.string() + "'");
}

CardinalityModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("cannot parse model '" + path.string() + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace edfilter
