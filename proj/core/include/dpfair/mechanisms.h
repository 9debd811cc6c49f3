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

#ifndef DPFAIR_MECHANISMS_H_
#define DPFAIR_MECHANISMS_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "dpfair/rng.h"

namespace dpfair {

// Privacy loss epsilon and L1 sensitivity of the released query. The
// Laplace scale is derived, never stored independently.
class PrivacySpec {
 public:
  static absl::StatusOr<PrivacySpec> Create(double epsilon,
                                            double sensitivity = 1.0);

  double epsilon() const { return epsilon_; }
  double sensitivity() const { return sensitivity_; }
  double scale() const { return sensitivity_ / epsilon_; }

  friend bool operator==(const PrivacySpec&, const PrivacySpec&) = default;

 private:
  PrivacySpec(double epsilon, double sensitivity)
      : epsilon_(epsilon), sensitivity_(sensitivity) {}

  double epsilon_;
  double sensitivity_;
};

// Inverse-CDF map from u in (0, 1) to a Laplace(0, scale) variate. Exposed
// so that callers holding their own uniforms (antithetic pairs, tests) use
// exactly the same transform.
double LaplaceFromUniform(double u, double scale);

// One draw from Laplace(0, scale).
absl::StatusOr<double> SampleLaplace(double scale, RngStream& rng);

// Unchecked variant for hot loops; `scale` must already be validated.
inline double DrawLaplace(double scale, RngStream& rng) {
  return LaplaceFromUniform(rng.NextOpenUniform(), scale);
}

// Laplace mechanism: every cell of `data` receives independent
// Laplace(0, spec.scale()) noise. Cells are visited row-major, so a fixed
// stream reproduces the release bit for bit.
absl::StatusOr<Dataset> Release(const Dataset& data, const PrivacySpec& spec,
                                RngStream& rng);

// As above with one sensitivity per attribute.
absl::StatusOr<Dataset> Release(const Dataset& data, double epsilon,
                                std::span<const double> sensitivities,
                                RngStream& rng);

// Sequential composition: total privacy loss of running each part.
absl::StatusOr<double> ComposeBudgets(std::span<const double> parts);

// Splits epsilon according to `shares`, which must sum to one.
absl::StatusOr<std::vector<double>> SplitBudget(double epsilon,
                                                std::span<const double> shares);

}  // namespace dpfair

#endif  // DPFAIR_MECHANISMS_H_
