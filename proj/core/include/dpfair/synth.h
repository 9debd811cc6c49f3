//
// Copyright 2026 The dpfair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPFAIR_SYNTH_H_
#define DPFAIR_SYNTH_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "nlohmann/json.hpp"

namespace dpfair {

// n integer counts from a continuous power law with density proportional to
// x^-exponent on [min, max], rounded to the nearest integer. Attribute
// "count".
absl::StatusOr<Dataset> PowerLawCounts(int64_t n, double exponent, double min,
                                       double max, uint64_t seed);

// x_i = i for i = 1..n. Attribute "count".
absl::StatusOr<Dataset> LinearRamp(int64_t n);

// Synthetic counties with attributes x_s, x_sp, x_spe: x_s log-uniform on
// [80, 1e7], x_sp = round(p_sp x_s) with p_sp ~ U(0.01, 0.12), and
// x_spe = round(p_spe x_sp) with p_spe ~ U(0, 0.04). x_sp is at least 1.
absl::StatusOr<Dataset> MinorityCounties(int64_t n, uint64_t seed);

// {"generator": "power_law", "n", "exponent", "min", "max", "seed"}
// {"generator": "linear_ramp", "n"}
// {"generator": "minority_counties", "n", "seed"}
absl::StatusOr<Dataset> GenerateFromJson(const nlohmann::json& spec);

// Writes the dataset in the matching ingest schema.
std::string AllotmentToCsv(const Dataset& data);
std::string MinorityToCsv(const Dataset& data);

}  // namespace dpfair

#endif  // DPFAIR_SYNTH_H_
