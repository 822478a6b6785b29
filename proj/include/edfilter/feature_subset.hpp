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

#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace edfilter {

// Canonical feature set: strictly ascending, duplicate free. Canonical form is
// the equality, ordering and hash key.
class FeatureSubset {
 public:
  FeatureSubset() = default;
  // Sorts and deduplicates.
  explicit FeatureSubset(std::vector<std::size_t> indices);
  FeatureSubset(std::initializer_list<std::size_t> indices)
      : FeatureSubset(std::vector<std::size_t>(indices)) {}

  static FeatureSubset singleton(std::size_t f) { return FeatureSubset({f}); }

  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(std::size_t f) const;
  std::size_t max_index() const { return indices_.back(); }

  FeatureSubset with(std::size_t f) const;
  FeatureSubset without(std::size_t f) const;

  // Throws std::out_of_range if any index >= n_features.
  void check_bounds(std::size_t n_features) const;

  std::string to_string() const;

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend bool operator==(const FeatureSubset&, const FeatureSubset&) = default;
  friend auto operator<=>(const FeatureSubset& a, const FeatureSubset& b) {
    return a.indices_ <=> b.indices_;
  }

 private:
  std::vector<std::size_t> indices_;
};

struct FeatureSubsetHash {
  std::size_t operator()(const FeatureSubset& s) const noexcept;
};

// Search tie order: smaller cardinality first, then lexicographic.
inline bool smaller_then_lexicographic(const FeatureSubset& a, const FeatureSubset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace edfilter
