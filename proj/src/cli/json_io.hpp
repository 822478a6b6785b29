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

// JSON forms of the shared config structs, used by the command runners.
#pragma once

#include <json.hpp>

#include "edfilter/cardinality_model.hpp"
#include "edfilter/classifier.hpp"
#include "edfilter/info_theory.hpp"

namespace edfilter::cli {

nlohmann::json cv_to_json(const CvConfig& cv);
CvConfig cv_from_json(const nlohmann::json& j);
nlohmann::json discretization_to_json(const Discretization& d);
Discretization discretization_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace edfilter::cli
