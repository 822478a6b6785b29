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

// Regression anchors. Each value was computed once by the independent
// reference code in oracles.hpp and frozen here.
#pragma once

#include <cstddef>
#include <vector>

#include "edfilter/dataset.hpp"

namespace edfilter::anchors {

// synth seed 7: 10 features, 3 informative, 500 rows, 4 classes, noise 0.1.
inline constexpr double kSeed7Ig0 = 0.49687971039545387;
inline constexpr double kSeed7Ig1 = 0.22031548255260813;
inline constexpr double kSeed7Ig2 = 0.52071710056519005;
inline constexpr double kSeed7Ig012 = 0.94399625463950754;
inline constexpr double kSeed7ThetaInformative = 339.0 / 500.0;
inline constexpr double kSeed7OracleTheta = 351.0 / 500.0;
inline const std::vector<std::size_t> kSeed7OracleSubset{0, 1, 2, 4, 5, 6, 9};
// Oracle cardinalities of the 100-row chunks (chunk seed 7).
inline const std::vector<std::size_t> kSeed7ChunkCardinalities{4, 7, 4, 3, 5};

// A matrix where every added informative feature raises accuracy.
inline const SynthSpec kChainSpec{6, 3, 600, 4, 0.0, 6, 0};
inline const std::vector<std::size_t> kChainInformative{0, 1, 2};

}  // namespace edfilter::anchors
