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

#include "dpfair/synth.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "dpfair/report_io.h"
#include "dpfair/rng.h"

namespace dpfair {
namespace {

// Separate stream ids per generator keep datasets from sharing draws.
constexpr uint64_t kPowerLawStream = 0x5057;
constexpr uint64_t kCountyStream = 0x434f;

std::vector<std::string> Ids(const std::string& prefix, int64_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  const int width = static_cast<int>(std::to_string(n > 0 ? n - 1 : 0).size());
  for (int64_t i = 0; i < n; ++i) {
    std::string num = std::to_string(i);
    ids.push_back(absl::StrCat(prefix, std::string(width - num.size(), '0'),
                               num));
  }
  return ids;
}

absl::Status CheckSize(int64_t n) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("entity count must be >= 1, got ", n));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Dataset> PowerLawCounts(int64_t n, double exponent, double min,
                                       double max, uint64_t seed) {
  if (auto s = CheckSize(n); !s.ok()) return s;
  if (!(min >= 0 && max >= min && std::isfinite(max))) {
    return absl::InvalidArgumentError(
        absl::StrCat("need 0 <= min <= max, got [", min, ", ", max, "]"));
  }
  if (!(exponent > 0) || !std::isfinite(exponent)) {
    return absl::InvalidArgumentError(
        absl::StrCat("exponent must be positive, got ", exponent));
  }
  if (min == 0 && exponent >= 1) {
    return absl::InvalidArgumentError(
        "min must be positive for exponent >= 1");
  }
  RngStream rng(seed, kPowerLawStream);
  std::vector<double> values(n);
  const double k = 1 - exponent;
  for (int64_t i = 0; i < n; ++i) {
    const double u = rng.NextOpenUniform();
    double x;
    if (min == max) {
      x = min;
    } else if (std::fabs(k) < 1e-12) {
      x = min * std::pow(max / min, u);
    } else {
      const double a = std::pow(min, k), b = std::pow(max, k);
      x = std::pow(a + u * (b - a), 1 / k);
    }
    values[i] = std::round(std::clamp(x, min, max));
  }
  return Dataset::Create(Ids("d", n), {"count"}, std::move(values),
                         DataKind::kRaw);
}

absl::StatusOr<Dataset> LinearRamp(int64_t n) {
  if (auto s = CheckSize(n); !s.ok()) return s;
  std::vector<double> values(n);
  for (int64_t i = 0; i < n; ++i) values[i] = static_cast<double>(i + 1);
  return Dataset::Create(Ids("r", n), {"count"}, std::move(values),
                         DataKind::kRaw);
}

absl::StatusOr<Dataset> MinorityCounties(int64_t n, uint64_t seed) {
  if (auto s = CheckSize(n); !s.ok()) return s;
  RngStream rng(seed, kCountyStream);
  std::vector<double> values;
  values.reserve(3 * n);
  const double lo = std::log(80.0), hi = std::log(1e7);
  for (int64_t i = 0; i < n; ++i) {
    const double xs = std::round(std::exp(lo + (hi - lo) * rng.NextOpenUniform()));
    const double p_sp = 0.01 + 0.11 * rng.NextOpenUniform();
    const double p_spe = 0.04 * rng.NextOpenUniform();
    const double xsp = std::max(1.0, std::round(p_sp * xs));
    const double xspe = std::round(p_spe * xsp);
    values.insert(values.end(), {xs, xsp, xspe});
  }
  return Dataset::Create(Ids("c", n), {"x_s", "x_sp", "x_spe"},
                         std::move(values), DataKind::kRaw);
}

absl::StatusOr<Dataset> GenerateFromJson(const nlohmann::json& spec) {
  try {
    const std::string gen = spec.at("generator").get<std::string>();
    const int64_t n = spec.at("n").get<int64_t>();
    if (gen == "power_law") {
      return PowerLawCounts(n, spec.value("exponent", 2.0),
                            spec.value("min", 10.0), spec.value("max", 1e5),
                            spec.value("seed", uint64_t{0}));
    }
    if (gen == "linear_ramp") return LinearRamp(n);
    if (gen == "minority_counties") {
      return MinorityCounties(n, spec.value("seed", uint64_t{0}));
    }
    return absl::InvalidArgumentError(
        absl::StrCat("unknown generator '", gen, "'"));
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed generator spec: ", e.what()));
  }
}

std::string AllotmentToCsv(const Dataset& data) {
  std::string out = "district_id,count\n";
  for (size_t i = 0; i < data.num_entities(); ++i) {
    absl::StrAppend(&out, data.entity_ids()[i], ",",
                    FormatDouble(data.at(i, 0)), "\n");
  }
  return out;
}

std::string MinorityToCsv(const Dataset& data) {
  std::string out = "county_id,x_s,x_sp,x_spe\n";
  for (size_t i = 0; i < data.num_entities(); ++i) {
    absl::StrAppend(&out, data.entity_ids()[i]);
    for (size_t j = 0; j < data.num_attributes(); ++j) {
      absl::StrAppend(&out, ",", FormatDouble(data.at(i, j)));
    }
    absl::StrAppend(&out, "\n");
  }
  return out;
}

}  // namespace dpfair
