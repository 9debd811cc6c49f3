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

#ifndef DPFAIR_MITIGATION_H_
#define DPFAIR_MITIGATION_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "dpfair/estimator.h"
#include "dpfair/fairness.h"
#include "dpfair/problems.h"
#include "dpfair/rng.h"
#include "nlohmann/json.hpp"

namespace dpfair {

// Counts released with half the budget plus a separately released
// normalizer Z = sum_i a_i x_i with the other half.
struct RedundantRelease {
  Dataset noisy_counts;
  double noisy_normalizer = 0;
  double epsilon_counts = 0;
  double epsilon_normalizer = 0;
  // Sensitivity used for the normalizer release (a_max).
  double normalizer_sensitivity = 0;

  double total_epsilon() const { return epsilon_counts + epsilon_normalizer; }
};

// Releases column `attr` of `data` with Laplace(1 / (eps/2)) per count and
// Z with Laplace(a_max / (eps/2)). The two halves compose to `epsilon`.
absl::StatusOr<RedundantRelease> ReleaseWithRedundantZ(
    const Dataset& data, size_t attr, std::span<const double> weights,
    double epsilon, RngStream& rng);

// a_i x~_i / Z~ with Z~ held constant (no renormalization; shares need not
// sum to one). Fails with the offending value when Z~ <= 0.
absl::StatusOr<ProblemOutput> LinearProxyAllotment(
    const RedundantRelease& release, std::span<const double> weights,
    size_t attr = 0);

// Default public lower bound on Z: 0.9 Z.
double DefaultNormalizerLowerBound(std::span<const double> weights,
                                   const Dataset& data, size_t attr);

// Exact shares plus i.i.d. Laplace((2 a_max / L) / epsilon) on each output.
// `lower_bound` defaults to DefaultNormalizerLowerBound.
absl::StatusOr<ProblemOutput> OutputPerturbationPf(
    const Dataset& data, size_t attr, std::span<const double> weights,
    double epsilon, std::optional<double> lower_bound, RngStream& rng);

// Monte Carlo audits of the allotment mitigations; reports are in signed
// mode and carry mean_abs_error per entity.
//
// Linear proxy. When `fixed_noisy_normalizer` is set, Z~ is held at that
// value (conditional audit, truth = a_i x_i / Z~); otherwise Z~ is redrawn
// each time (marginal audit, truth = a_i x_i / Z).
absl::StatusOr<FairnessReport> AuditLinearProxy(
    const Dataset& data, size_t attr, std::span<const double> weights,
    double epsilon, std::optional<double> fixed_noisy_normalizer,
    const EstimatorOptions& estimator);

absl::StatusOr<FairnessReport> AuditOutputPerturbation(
    const Dataset& data, size_t attr, std::span<const double> weights,
    double epsilon, std::optional<double> lower_bound,
    const EstimatorOptions& estimator);

// G-1 quantile breakpoints of the released grouping attribute. Duplicate
// cut points are merged, so heavily tied data can yield fewer groups.
absl::StatusOr<std::vector<double>> PartitionGroups(
    std::span<const double> released_values, int groups);

// Index of the group containing `value`.
size_t GroupOf(std::span<const double> breakpoints, double value);

enum class FitMethod { kLeastSquares, kHinge };

struct LinearPiece {
  // Over standardized features (x - mean) / scale.
  std::vector<double> coefficients;
  double intercept = 0;
  double threshold = 0;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
  // Training accuracy against the supplied labels.
  double train_accuracy = 0;
  size_t train_size = 0;

  double Score(std::span<const double> features) const;

  friend bool operator==(const LinearPiece&, const LinearPiece&) = default;
};

// A piecewise-linear decision rule: the grouping attribute selects a piece,
// the piece thresholds a linear score of the feature attributes.
struct PiecewiseProxy {
  std::string grouping_attribute;
  std::vector<std::string> features;
  std::vector<double> breakpoints;
  std::vector<LinearPiece> pieces;
  FitMethod method = FitMethod::kLeastSquares;

  friend bool operator==(const PiecewiseProxy&,
                         const PiecewiseProxy&) = default;
};

// Proxy bound to an attribute layout.
class BoundProxy {
 public:
  static absl::StatusOr<BoundProxy> Bind(
      const PiecewiseProxy& proxy, const std::vector<std::string>& attributes);

  bool Decide(std::span<const double> row) const;
  size_t Group(std::span<const double> row) const;

 private:
  const PiecewiseProxy* proxy_ = nullptr;
  size_t grouping_index_ = 0;
  std::vector<size_t> feature_index_;
};

struct PiecewiseFitOptions {
  FitMethod method = FitMethod::kLeastSquares;
  std::string grouping_attribute = "x_sp";
  std::vector<std::string> features = {"x_spe", "x_sp", "x_s"};
  int hinge_epochs = 1000;
  double hinge_learning_rate = 1e-2;
  double hinge_l2 = 1e-4;
};

// Fits one linear piece per group. `train` supplies the features (released
// counts are used as-is, negatives included), `labels` the true rule
// outputs. Rows are routed by `breakpoints` on the grouping attribute.
absl::StatusOr<PiecewiseProxy> FitPiecewiseProxy(
    const Dataset& train, std::span<const int> labels,
    std::span<const double> breakpoints, const PiecewiseFitOptions& options);

// Misclassification audit of the proxy under the Laplace mechanism on every
// attribute: bias_i = E[Pbar_i(x~)] - Pbar_i(x), absolute mode.
absl::StatusOr<FairnessReport> AuditPiecewiseProxy(
    const PiecewiseProxy& proxy, const Dataset& data, const PrivacySpec& spec,
    const EstimatorOptions& estimator);

// alpha restricted to each group; `group_of_entity` gives the frozen group
// index of every report entity.
std::vector<double> GroupAlphas(const FairnessReport& report,
                                std::span<const size_t> group_of_entity,
                                size_t num_groups);

nlohmann::json ProxyToJson(const PiecewiseProxy& proxy);
absl::StatusOr<PiecewiseProxy> ProxyFromJson(const nlohmann::json& j);

struct CostOfPrivacyReport {
  std::vector<std::string> entity_ids;
  // |bias_i| * budget for negatively biased entities, 0 otherwise.
  std::vector<double> per_entity_shortfall;
  double total = 0;
  double budget = 0;
};

// Extra budget needed so that no entity is under-allocated in expectation.
absl::StatusOr<CostOfPrivacyReport> CostOfPrivacy(const FairnessReport& report,
                                                  double budget);

const char* FitMethodName(FitMethod method);

}  // namespace dpfair

#endif  // DPFAIR_MITIGATION_H_
