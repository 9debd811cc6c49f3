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

#include "dpfair/postprocess.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace dpfair {

absl::StatusOr<double> ExpectedClipped(double x, double level, double scale) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive, got ", scale));
  }
  if (!(level < x)) {
    return absl::OutOfRangeError(absl::StrCat(
        "clipped expectation needs level < x; got level ", level, ", x ", x));
  }
  return x + 0.5 * scale * std::exp((level - x) / scale);
}

int64_t StochasticRoundValue(double z, RngStream& rng) {
  const double lo = std::floor(z);
  const double frac = z - lo;
  const auto base = static_cast<int64_t>(lo);
  if (frac == 0) return base;
  return rng.NextOpenUniform() < frac ? base + 1 : base;
}

std::vector<double> ProjectSumValues(std::span<const double> z,
                                     double target) {
  double sum = 0;
  double magnitude = std::fabs(target);
  for (double v : z) {
    sum += v;
    magnitude += std::fabs(v);
  }
  std::vector<double> out(z.begin(), z.end());
  // Points already on the hyperplane up to summation rounding are left
  // untouched, which makes the projection exactly idempotent.
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                       static_cast<double>(z.size()) * magnitude;
  if (std::fabs(target - sum) <= slack) return out;
  const double shift = (target - sum) / static_cast<double>(z.size());
  for (double& v : out) v += shift;
  return out;
}

double TemperatureClipValue(double z, double level, double temperature) {
  const double clipped = ClipLowerValue(z, level);
  const double corrected = clipped - temperature / (clipped + 1.0 - level);
  return ClipLowerValue(corrected, level);
}

absl::Status ValidateStep(const PostStep& step) {
  if (const auto* c = std::get_if<ClipLower>(&step)) {
    if (!std::isfinite(c->level)) {
      return absl::InvalidArgumentError("clip_lower level must be finite");
    }
  } else if (const auto* p = std::get_if<ProjectSum>(&step)) {
    if (!std::isfinite(p->target)) {
      return absl::InvalidArgumentError("project_sum target must be finite");
    }
  } else if (const auto* t = std::get_if<TemperatureClip>(&step)) {
    if (!std::isfinite(t->level)) {
      return absl::InvalidArgumentError(
          "temperature_clip level must be finite");
    }
    if (!(t->temperature >= 0) || !std::isfinite(t->temperature)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "temperature must be nonnegative, got ", t->temperature));
    }
  }
  return absl::OkStatus();
}

absl::Status ApplyPipeline(const Pipeline& pipeline, Dataset& data,
                           RngStream& rng) {
  auto cells = data.mutable_values();
  for (const PostStep& step : pipeline) {
    if (const auto* c = std::get_if<ClipLower>(&step)) {
      for (double& v : cells) v = ClipLowerValue(v, c->level);
    } else if (std::holds_alternative<StochasticRound>(step)) {
      for (double& v : cells) {
        v = static_cast<double>(StochasticRoundValue(v, rng));
      }
    } else if (const auto* t = std::get_if<TemperatureClip>(&step)) {
      for (double& v : cells) {
        v = TemperatureClipValue(v, t->level, t->temperature);
      }
    } else {
      const double target = std::get<ProjectSum>(step).target;
      for (size_t j = 0; j < data.num_attributes(); ++j) {
        const auto projected = ProjectSumValues(data.Column(j), target);
        for (size_t i = 0; i < projected.size(); ++i) {
          data.at(i, j) = projected[i];
        }
      }
    }
  }
  return absl::OkStatus();
}

nlohmann::json PipelineToJson(const Pipeline& pipeline) {
  auto out = nlohmann::json::array();
  for (const PostStep& step : pipeline) {
    if (const auto* c = std::get_if<ClipLower>(&step)) {
      out.push_back({{"clip_lower", c->level}});
    } else if (std::holds_alternative<StochasticRound>(step)) {
      out.push_back("stochastic_round");
    } else if (const auto* p = std::get_if<ProjectSum>(&step)) {
      out.push_back({{"project_sum", p->target}});
    } else {
      const auto& t = std::get<TemperatureClip>(step);
      out.push_back(
          {{"temperature_clip", {{"level", t.level}, {"T", t.temperature}}}});
    }
  }
  return out;
}

absl::StatusOr<Pipeline> PipelineFromJson(const nlohmann::json& j) {
  if (!j.is_array()) {
    return absl::InvalidArgumentError("\"pipeline\" must be a JSON array");
  }
  Pipeline out;
  for (const auto& item : j) {
    std::string name;
    nlohmann::json arg;
    if (item.is_string()) {
      name = item.get<std::string>();
    } else if (item.is_object() && item.size() == 1) {
      name = item.begin().key();
      arg = item.begin().value();
    } else {
      return absl::InvalidArgumentError(absl::StrCat(
          "pipeline step must be a name or a one-key object, got ",
          item.dump()));
    }
    PostStep step;
    if (name == "stochastic_round") {
      step = StochasticRound{};
    } else if (name == "clip_lower" || name == "project_sum") {
      if (!arg.is_number()) {
        return absl::InvalidArgumentError(
            absl::StrCat("pipeline step '", name, "' needs a numeric value"));
      }
      if (name == "clip_lower") {
        step = ClipLower{arg.get<double>()};
      } else {
        step = ProjectSum{arg.get<double>()};
      }
    } else if (name == "temperature_clip") {
      if (!arg.is_object() || !arg.contains("T") || !arg["T"].is_number()) {
        return absl::InvalidArgumentError(
            "pipeline step 'temperature_clip' needs {\"level\": .., \"T\": ..}");
      }
      step = TemperatureClip{arg.value("level", 0.0), arg["T"].get<double>()};
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown pipeline step '", name, "'"));
    }
    if (auto s = ValidateStep(step); !s.ok()) return s;
    out.push_back(step);
  }
  return out;
}

Pipeline NonNegativeIntegerPipeline() {
  return {ClipLower{0.0}, StochasticRound{}};
}

std::vector<double> DefaultTemperatureGrid(double scale, int count) {
  std::vector<double> grid;
  if (count <= 0) return grid;
  if (count == 1) return {scale};
  const double lo = std::log(1e-2 * scale);
  const double hi = std::log(1e2 * scale);
  for (int t = 0; t < count; ++t) {
    grid.push_back(std::exp(lo + (hi - lo) * t / (count - 1)));
  }
  return grid;
}

absl::StatusOr<TemperatureTuning> TuneTemperature(
    std::span<const double> domain, double level, const PrivacySpec& spec,
    std::span<const double> grid, int64_t samples, const RngStream& rng) {
  if (domain.empty()) {
    return absl::InvalidArgumentError("temperature tuning needs a domain");
  }
  if (grid.empty()) {
    return absl::InvalidArgumentError(
        "temperature tuning needs candidate temperatures");
  }
  if (samples < 1) {
    return absl::InvalidArgumentError("temperature tuning needs samples >= 1");
  }
  for (double x : domain) {
    if (!(x >= level)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "domain value ", x, " lies below the clip level ", level));
    }
  }
  for (double t : grid) {
    if (!(t >= 0) || !std::isfinite(t)) {
      return absl::InvalidArgumentError(
          absl::StrCat("temperatures must be nonnegative, got ", t));
    }
  }
  // Column 0 is the uncorrected baseline.
  std::vector<double> temps{0.0};
  temps.insert(temps.end(), grid.begin(), grid.end());
  std::vector<double> max_bias(temps.size(), -1.0);
  std::vector<double> min_bias(temps.size(),
                               std::numeric_limits<double>::infinity());
  std::vector<double> sums(temps.size());
  const double scale = spec.scale();
  for (size_t d = 0; d < domain.size(); ++d) {
    RngStream stream = rng.Substream(d);
    std::fill(sums.begin(), sums.end(), 0.0);
    const double x = domain[d];
    for (int64_t s = 0; s < samples; ++s) {
      const double noisy = x + DrawLaplace(scale, stream);
      for (size_t t = 0; t < temps.size(); ++t) {
        sums[t] += TemperatureClipValue(noisy, level, temps[t]) - x;
      }
    }
    for (size_t t = 0; t < temps.size(); ++t) {
      const double bias = std::fabs(sums[t] / static_cast<double>(samples));
      max_bias[t] = std::max(max_bias[t], bias);
      min_bias[t] = std::min(min_bias[t], bias);
    }
  }
  TemperatureTuning out;
  out.grid.assign(grid.begin(), grid.end());
  out.baseline_score = max_bias[0] - min_bias[0];
  size_t best = 0;
  for (size_t g = 0; g < grid.size(); ++g) {
    const double score = max_bias[g + 1] - min_bias[g + 1];
    out.scores.push_back(score);
    if (g == 0 || score < out.scores[best] ||
        (score == out.scores[best] && grid[g] < grid[best])) {
      best = g;
    }
  }
  out.best_temperature = grid[best];
  out.best_score = out.scores[best];
  return out;
}

}  // namespace dpfair
