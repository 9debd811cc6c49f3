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

#include "dpfair/mechanisms.h"

#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpfair {

absl::StatusOr<PrivacySpec> PrivacySpec::Create(double epsilon,
                                                double sensitivity) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  if (!(sensitivity > 0) || !std::isfinite(sensitivity)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sensitivity must be positive and finite, got ", sensitivity));
  }
  return PrivacySpec(epsilon, sensitivity);
}

double LaplaceFromUniform(double u, double scale) {
  const double centered = u - 0.5;
  if (centered == 0) return 0.0;
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(centered));
  return centered > 0 ? magnitude : -magnitude;
}

absl::StatusOr<double> SampleLaplace(double scale, RngStream& rng) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive, got ", scale));
  }
  return DrawLaplace(scale, rng);
}

absl::StatusOr<Dataset> Release(const Dataset& data, const PrivacySpec& spec,
                                RngStream& rng) {
  std::vector<double> sens(data.num_attributes(), spec.sensitivity());
  return Release(data, spec.epsilon(), sens, rng);
}

absl::StatusOr<Dataset> Release(const Dataset& data, double epsilon,
                                std::span<const double> sensitivities,
                                RngStream& rng) {
  if (!data.is_raw()) {
    return absl::FailedPreconditionError(
        "the Laplace mechanism takes raw data; got an already released "
        "dataset");
  }
  if (sensitivities.size() != data.num_attributes()) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", data.num_attributes(),
                     " sensitivities, got ", sensitivities.size()));
  }
  std::vector<double> scales(sensitivities.size());
  for (size_t j = 0; j < scales.size(); ++j) {
    auto spec = PrivacySpec::Create(epsilon, sensitivities[j]);
    if (!spec.ok()) return spec.status();
    scales[j] = spec->scale();
  }
  std::vector<double> noisy(data.values().begin(), data.values().end());
  const size_t k = scales.size();
  for (size_t c = 0; c < noisy.size(); ++c) {
    noisy[c] += DrawLaplace(scales[c % k], rng);
  }
  return data.WithReleasedValues(std::move(noisy));
}

absl::StatusOr<double> ComposeBudgets(std::span<const double> parts) {
  if (parts.empty()) {
    return absl::InvalidArgumentError("no budgets to compose");
  }
  for (double p : parts) {
    if (!(p > 0) || !std::isfinite(p)) {
      return absl::InvalidArgumentError(
          absl::StrCat("budget parts must be positive, got ", p));
    }
  }
  return std::accumulate(parts.begin(), parts.end(), 0.0);
}

absl::StatusOr<std::vector<double>> SplitBudget(
    double epsilon, std::span<const double> shares) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (shares.empty()) {
    return absl::InvalidArgumentError("no shares given");
  }
  double total = 0;
  for (double s : shares) {
    if (!(s > 0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("shares must be positive, got ", s));
    }
    total += s;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    return absl::InvalidArgumentError(
        absl::StrCat("shares must sum to 1, got ", total));
  }
  std::vector<double> out;
  out.reserve(shares.size());
  for (double s : shares) out.push_back(epsilon * s);
  return out;
}

}  // namespace dpfair
