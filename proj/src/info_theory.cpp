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

#include "edfilter/info_theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace edfilter {
namespace {

// -(1/N) sum_i n_i log2(n_i / N); shared by H(Y) and H(Y|F) so that an
// uninformative column reproduces H(Y) bit for bit.
double weighted_entropy_sum(std::span<const std::size_t> counts, std::size_t total) {
  double acc = 0.0;
  const double t = static_cast<double>(total);
  for (std::size_t n : counts) {
    if (n == 0) continue;
    const double c = static_cast<double>(n);
    acc += c * std::log2(c / t);
  }
  return -acc;
}

int label_span(std::span<const ClassId> labels) {
  int max_label = 0;
  for (ClassId y : labels) {
    if (y < 0) throw std::invalid_argument("negative class label");
    max_label = std::max(max_label, y);
  }
  return max_label + 1;
}

double conditional_entropy_impl(std::span<const int> codes, int n_codes,
                                std::span<const ClassId> labels, int n_classes) {
  const std::size_t stride = static_cast<std::size_t>(n_classes);
  std::vector<std::size_t> joint(static_cast<std::size_t>(n_codes) * stride, 0);
  std::vector<std::size_t> marginal(static_cast<std::size_t>(n_codes), 0);
  for (std::size_t r = 0; r < codes.size(); ++r) {
    const auto f = static_cast<std::size_t>(codes[r]);
    ++joint[f * stride + static_cast<std::size_t>(labels[r])];
    ++marginal[f];
  }
  double acc = 0.0;
  for (std::size_t f = 0; f < marginal.size(); ++f) {
    if (marginal[f] == 0) continue;
    acc += weighted_entropy_sum({joint.data() + f * stride, stride}, marginal[f]);
  }
  return acc / static_cast<double>(codes.size());
}

// Dense relabelling of (code, value) pairs, first occurrence order.
void refine(std::vector<int>& codes, int& n_codes, std::span<const int> values, int n_values) {
  std::vector<int> remap(static_cast<std::size_t>(n_codes) * static_cast<std::size_t>(n_values),
                         -1);
  int next = 0;
  for (std::size_t r = 0; r < codes.size(); ++r) {
    const std::size_t key = static_cast<std::size_t>(codes[r]) * static_cast<std::size_t>(n_values) +
                            static_cast<std::size_t>(values[r]);
    if (remap[key] < 0) remap[key] = next++;
    codes[r] = remap[key];
  }
  n_codes = next;
}

}  // namespace

Discretization Discretization::equal_width(int bins) {
  if (bins < 1) throw std::invalid_argument("equal-width discretisation needs bins >= 1");
  return {Kind::kEqualWidth, bins};
}

DiscretizedColumn discretize(std::span<const Count> column, const Discretization& scheme) {
  DiscretizedColumn out;
  out.values.resize(column.size());
  if (scheme.kind == Discretization::Kind::kPresence) {
    out.n_bins = 3;
    for (std::size_t i = 0; i < column.size(); ++i) {
      out.values[i] = column[i] <= 0 ? 0 : (column[i] == 1 ? 1 : 2);
    }
    return out;
  }
  out.n_bins = scheme.bins;
  if (column.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(column.begin(), column.end());
  const Count lo = *lo_it;
  const Count hi = *hi_it;
  if (hi == lo) return out;  // all zero codes
  const double width = static_cast<double>(hi - lo) / scheme.bins;
  for (std::size_t i = 0; i < column.size(); ++i) {
    const int bin = static_cast<int>(std::floor(static_cast<double>(column[i] - lo) / width));
    out.values[i] = std::clamp(bin, 0, scheme.bins - 1);
  }
  return out;
}

double entropy(std::span<const ClassId> labels) {
  if (labels.empty()) throw std::invalid_argument("entropy of an empty label list");
  std::vector<std::size_t> counts(static_cast<std::size_t>(label_span(labels)), 0);
  for (ClassId y : labels) ++counts[static_cast<std::size_t>(y)];
  return weighted_entropy_sum(counts, labels.size()) / static_cast<double>(labels.size());
}

double conditional_entropy(const DiscretizedColumn& column, std::span<const ClassId> labels) {
  if (column.values.size() != labels.size()) {
    throw std::invalid_argument("conditional_entropy: column has " +
                                std::to_string(column.values.size()) + " rows, labels " +
                                std::to_string(labels.size()));
  }
  if (labels.empty()) throw std::invalid_argument("conditional_entropy of empty input");
  int n_codes = column.n_bins;
  for (int v : column.values) {
    if (v < 0) throw std::invalid_argument("negative categorical code");
    n_codes = std::max(n_codes, v + 1);
  }
  return conditional_entropy_impl(column.values, n_codes, labels, label_span(labels));
}

DiscretizedColumn joint_encode(std::span<const DiscretizedColumn> columns) {
  if (columns.empty()) throw std::invalid_argument("joint_encode needs at least one column");
  for (const auto& c : columns) {
    if (c.values.size() != columns.front().values.size()) {
      throw std::invalid_argument("joint_encode: columns differ in length");
    }
  }
  if (columns.size() == 1) return columns.front();
  DiscretizedColumn out = columns.front();
  for (std::size_t i = 1; i < columns.size(); ++i) {
    refine(out.values, out.n_bins, columns[i].values, columns[i].n_bins);
  }
  return out;
}

double info_gain(const FeatureMatrix& m, const FeatureSubset& subset,
                 const Discretization& scheme) {
  if (subset.empty()) throw std::invalid_argument("info_gain of an empty subset");
  subset.check_bounds(m.n_features());
  std::vector<DiscretizedColumn> columns;
  for (std::size_t f : subset) {
    const auto col = m.column(f);
    columns.push_back(discretize(col, scheme));
  }
  const DiscretizedColumn joint = joint_encode(columns);
  const double ig = entropy(m.labels()) - conditional_entropy(joint, m.labels());
  return std::max(ig, 0.0);
}

RankedFeatures rank_features(const FeatureMatrix& m, const Discretization& scheme) {
  const std::vector<double> gains = InfoGainTable(m, scheme).singleton_gains();
  RankedFeatures out;
  out.order.resize(gains.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
  for (std::size_t f : out.order) out.scores.push_back(gains[f]);
  return out;
}

InfoGainTable::InfoGainTable(const FeatureMatrix& m, const Discretization& scheme)
    : labels_(m.labels().begin(), m.labels().end()),
      n_classes_(m.n_classes()),
      label_entropy_(entropy(m.labels())) {
  columns_.reserve(m.n_features());
  for (std::size_t f = 0; f < m.n_features(); ++f) {
    const auto col = m.column(f);
    columns_.push_back(discretize(col, scheme));
  }
}

double InfoGainTable::info_gain(const FeatureSubset& subset) const {
  if (subset.empty()) throw std::invalid_argument("info_gain of an empty subset");
  subset.check_bounds(columns_.size());
  const auto& first = columns_[subset.indices().front()];
  std::vector<int> codes = first.values;
  int n_codes = first.n_bins;
  for (std::size_t i = 1; i < subset.size(); ++i) {
    const auto& col = columns_[subset.indices()[i]];
    refine(codes, n_codes, col.values, col.n_bins);
  }
  const double ig =
      label_entropy_ - conditional_entropy_impl(codes, n_codes, labels_, n_classes_);
  return std::max(ig, 0.0);
}

std::vector<double> InfoGainTable::singleton_gains() const {
  std::vector<double> out;
  out.reserve(columns_.size());
  for (std::size_t f = 0; f < columns_.size(); ++f) {
    out.push_back(info_gain(FeatureSubset::singleton(f)));
  }
  return out;
}

}  // namespace edfilter
