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

// Fano-style accuracy bounds relating pooled accuracy to information gain.
// n is the number of classes; logarithms are base 2.

namespace edfilter {

// Slack applied to every bound comparison.
inline constexpr double kBoundEpsilon = 1e-9;

struct BoundReport {
  // +infinity for two classes, where the bound is undefined.
  double raw_bound;
  // min(1, max(0, raw_bound)).
  double clamped_bound;
  int n_classes;
  double ig_bits;
};

// raw = (ig - log2 n + 1) / log2(n - 1) + 1, i.e. the Fano inequality solved
// for accuracy after replacing the binary entropy by its maximum of 1.
// Throws std::invalid_argument for n_classes < 2 or negative ig.
BoundReport accuracy_upper_bound(double ig_bits, int n_classes);

// H2(p) in bits with H2(0) = H2(1) = 0.
double binary_entropy(double p);

// log2 n - H2(theta) - (1 - theta) log2(n - 1) <= ig + kBoundEpsilon.
bool fano_check(double theta, double ig_bits, int n_classes);

// Left-hand side of the inequality checked by fano_check.
double fano_lhs(double theta, int n_classes);

}  // namespace edfilter
