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

#include "edfilter/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace edfilter {

BoundReport accuracy_upper_bound(double ig_bits, int n_classes) {
  if (n_classes < 2) {
    throw std::invalid_argument("accuracy bound needs n_classes >= 2, got " +
                                std::to_string(n_classes));
  }
  if (!(ig_bits >= 0.0)) throw std::invalid_argument("accuracy bound needs ig_bits >= 0");
  BoundReport report{0.0, 1.0, n_classes, ig_bits};
  if (n_classes == 2) {
    report.raw_bound = std::numeric_limits<double>::infinity();
    return report;
  }
  const double n = static_cast<double>(n_classes);
  report.raw_bound = (ig_bits - std::log2(n) + 1.0) / std::log2(n - 1.0) + 1.0;
  report.clamped_bound = std::clamp(report.raw_bound, 0.0, 1.0);
  return report;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double fano_lhs(double theta, int n_classes) {
  if (n_classes < 2) throw std::invalid_argument("fano_check needs n_classes >= 2");
  const double n = static_cast<double>(n_classes);
  return std::log2(n) - binary_entropy(theta) - (1.0 - theta) * std::log2(n - 1.0);
}

bool fano_check(double theta, double ig_bits, int n_classes) {
  return fano_lhs(theta, n_classes) <= ig_bits + kBoundEpsilon;
}

}  // namespace edfilter
