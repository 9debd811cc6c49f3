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

#ifndef DPFAIR_POSTPROCESS_H_
#define DPFAIR_POSTPROCESS_H_

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "dpfair/mechanisms.h"
#include "dpfair/rng.h"
#include "nlohmann/json.hpp"

namespace dpfair {

struct ClipLower {
  double level = 0;
  friend bool operator==(const ClipLower&, const ClipLower&) = default;
};
struct StochasticRound {
  friend bool operator==(const StochasticRound&,
                         const StochasticRound&) = default;
};
// Euclidean projection of each attribute column onto {sum = target}.
struct ProjectSum {
  double target = 1;
  friend bool operator==(const ProjectSum&, const ProjectSum&) = default;
};
struct TemperatureClip {
  double level = 0;
  double temperature = 0;
  friend bool operator==(const TemperatureClip&,
                         const TemperatureClip&) = default;
};

using PostStep =
    std::variant<ClipLower, StochasticRound, ProjectSum, TemperatureClip>;
using Pipeline = std::vector<PostStep>;

// max(level, z).
inline double ClipLowerValue(double z, double level) {
  return z < level ? level : z;
}

// Mean of max(level, x + Lap(scale)) for level < x:
//   x + (scale / 2) exp((level - x) / scale).
absl::StatusOr<double> ExpectedClipped(double x, double level, double scale);

// floor(z) with probability 1 - frac(z), floor(z) + 1 otherwise.
int64_t StochasticRoundValue(double z, RngStream& rng);

// Adds (target - sum z) / n to every coordinate.
std::vector<double> ProjectSumValues(std::span<const double> z, double target);

// Boundary-corrected clip:
//   zbar = max(level, z); zt = zbar - T / (zbar + 1 - level);
//   result = max(zt, level).
double TemperatureClipValue(double z, double level, double temperature);

absl::Status ValidateStep(const PostStep& step);

// Applies `pipeline` in order to a released dataset, in place. Cell-wise
// steps touch every cell; ProjectSum works per attribute column.
absl::Status ApplyPipeline(const Pipeline& pipeline, Dataset& data,
                           RngStream& rng);

// JSON form used in experiment configs:
//   [{"clip_lower": 0}, "stochastic_round", {"project_sum": 1},
//    {"temperature_clip": {"level": 0, "T": 0.5}}]
nlohmann::json PipelineToJson(const Pipeline& pipeline);
absl::StatusOr<Pipeline> PipelineFromJson(const nlohmann::json& j);

// ClipLower(0) then StochasticRound: the usual nonnegative-integer repair of
// released counts.
Pipeline NonNegativeIntegerPipeline();

struct TemperatureTuning {
  double best_temperature = 0;
  double best_score = 0;
  // Spread with no correction (plain clip), for comparison.
  double baseline_score = 0;
  std::vector<double> grid;
  std::vector<double> scores;
  // The tuner reads the true values, so its choice is not private.
  bool non_private = true;
};

// `count` log-spaced temperatures on [1e-2 * scale, 1e2 * scale].
std::vector<double> DefaultTemperatureGrid(double scale, int count = 25);

// Picks the grid temperature minimizing
//   max_x |E[xhat_T] - x| - min_x |E[xhat_T] - x|
// with expectations estimated from `samples` Laplace draws per domain value.
// Draws are shared across temperatures. Ties go to the smaller temperature.
absl::StatusOr<TemperatureTuning> TuneTemperature(
    std::span<const double> domain, double level, const PrivacySpec& spec,
    std::span<const double> grid, int64_t samples, const RngStream& rng);

}  // namespace dpfair

#endif  // DPFAIR_POSTPROCESS_H_
