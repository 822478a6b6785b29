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

#include "edfilter/feature_subset.hpp"

#include <algorithm>
#include <stdexcept>

namespace edfilter {

FeatureSubset::FeatureSubset(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

bool FeatureSubset::contains(std::size_t f) const {
  return std::binary_search(indices_.begin(), indices_.end(), f);
}

FeatureSubset FeatureSubset::with(std::size_t f) const {
  FeatureSubset out;
  out.indices_.reserve(indices_.size() + 1);
  const auto pos = std::lower_bound(indices_.begin(), indices_.end(), f);
  out.indices_.assign(indices_.begin(), pos);
  if (pos == indices_.end() || *pos != f) out.indices_.push_back(f);
  out.indices_.insert(out.indices_.end(), pos, indices_.end());
  return out;
}

FeatureSubset FeatureSubset::without(std::size_t f) const {
  FeatureSubset out;
  out.indices_.reserve(indices_.size());
  for (std::size_t i : indices_) {
    if (i != f) out.indices_.push_back(i);
  }
  return out;
}

void FeatureSubset::check_bounds(std::size_t n_features) const {
  if (!indices_.empty() && indices_.back() >= n_features) {
    throw std::out_of_range("feature index " + std::to_string(indices_.back()) +
                            " out of range for " + std::to_string(n_features) + " features");
  }
}

std::string FeatureSubset::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(indices_[i]);
  }
  return out + "}";
}

std::size_t FeatureSubsetHash::operator()(const FeatureSubset& s) const noexcept {
  // FNV-1a over the indices.
  std::size_t h = 1469598103934665603ull;
  for (std::size_t i : s.indices()) {
    h ^= i + 0x9e3779b97f4a7c15ull;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace edfilter
