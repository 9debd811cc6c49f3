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

#ifndef DPFAIR_FAIRNESS_H_
#define DPFAIR_FAIRNESS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "dpfair/estimator.h"
#include "dpfair/mechanisms.h"
#include "dpfair/postprocess.h"
#include "dpfair/predicate.h"
#include "dpfair/problems.h"
#include "nlohmann/json.hpp"

namespace dpfair {

enum class BiasMode {
  // Disparities over E[P_i(x~)] - P_i(x).
  kSigned,
  // Disparities over |bias|; for decision rules this is the
  // misclassification probability.
  kAbsolute,
};

struct BiasEstimate {
  std::string entity_id;
  double true_value = 0;
  double expected_private_value = 0;
  double bias = 0;
  double absolute_bias = 0;
  double std_error = 0;
  // Mean |P_i(x~) - P_i(x)| over the draws.
  double mean_abs_error = 0;
  int64_t samples = 0;
  // Fraction of draws in which a ratio leaf saw a nonpositive denominator.
  double degenerate_rate = 0;

  friend bool operator==(const BiasEstimate&, const BiasEstimate&) = default;
};

struct ReportConfig {
  double epsilon = 0;
  double sensitivity = 1;
  int64_t samples = 0;
  uint64_t master_seed = 0;
  int shard_count = 1;
  Sampling sampling = Sampling::kIndependent;

  friend bool operator==(const ReportConfig&, const ReportConfig&) = default;
};

struct FairnessReport {
  std::vector<BiasEstimate> per_entity;
  // disparity[i] = max_j |v_i - v_j| over the mode's bias values.
  std::vector<double> disparity;
  double alpha = 0;
  BiasMode mode = BiasMode::kSigned;
  ReportConfig config;
  // Free-form provenance (pipeline, filters, calibration notes).
  nlohmann::json metadata = nlohmann::json::object();

  friend bool operator==(const FairnessReport&,
                         const FairnessReport&) = default;
};

// Fills disparity and alpha from per_entity and mode.
void ComputeDisparities(FairnessReport& report);

// Root-sum-square of the per-entity standard errors: the standard error of
// the summed bias vector. Used as the yardstick for "alpha is statistically
// zero" checks, which must absorb the max-minus-min multiplicity over n
// entities.
double PooledStdError(const FairnessReport& report);

// Assembles a report from Monte Carlo deviations around `truth`.
// `keep`, when non-empty, selects the entities that enter the report.
FairnessReport BuildReport(const std::vector<std::string>& entity_ids,
                           std::span<const double> truth,
                           const MonteCarloResult& mc, BiasMode mode,
                           const ReportConfig& config,
                           const std::vector<bool>& keep = {});

struct AuditOptions {
  EstimatorOptions estimator;
  // Applied to each released dataset before the problem is evaluated.
  Pipeline pipeline;
  // Projects the problem outputs onto {sum = target} after evaluation.
  std::optional<double> project_outputs_to;
  // Defaults to kAbsolute for decision rules and kSigned otherwise.
  std::optional<BiasMode> mode;
  // Decision rules only: keep entities whose true decision is True.
  bool true_positives_only = false;
};

// Estimates E[P_i(M(x))] - P_i(x) for every entity from m mechanism draws.
absl::StatusOr<FairnessReport> EmpiricalBias(const Problem& problem,
                                             const Dataset& data,
                                             const PrivacySpec& spec,
                                             const AuditOptions& options);

// Lower-level form: noise scale given per attribute.
absl::StatusOr<FairnessReport> EmpiricalBias(
    const Problem& problem, const Dataset& data, double epsilon,
    std::span<const double> sensitivities, const AuditOptions& options);

// Second-order bias estimate c * (1/2) Var[eta] Tr(H P_i)(x) with
// Var[eta] = 2 scale^2. The default coefficient c = 1 follows from i.i.d.
// per-coordinate noise; c = n is the other candidate the calibration
// harness compares.
absl::StatusOr<double> TaylorBias(const AllotmentProblem& problem,
                                  const Dataset& data, size_t attr,
                                  const PrivacySpec& spec, size_t entity,
                                  double coefficient = 1.0);

struct TaylorCalibration {
  std::vector<double> candidates;
  // Per candidate: sum over entities of ((taylor - mc) / std_error)^2.
  std::vector<double> chi_square;
  // Per candidate: max over entities of |taylor - mc| / std_error.
  std::vector<double> max_abs_z;
  double chosen = 1.0;
  FairnessReport monte_carlo;
};

// Compares Taylor coefficients {1, n} against a Monte Carlo estimate on
// `data` and picks the candidate with the smaller chi-square.
absl::StatusOr<TaylorCalibration> CalibrateTaylorCoefficient(
    const AllotmentProblem& problem, const Dataset& data, size_t attr,
    const PrivacySpec& spec, const EstimatorOptions& estimator);

// Misclassification probability of 1{x >= level} under Laplace(scale)
// noise: (1/2) exp(-|x - level| / scale).
absl::StatusOr<double> ThresholdBiasClosedForm(double x, double level,
                                               double scale);

// Probability that op(P1, P2) flips, given the true child values and the
// independent child flip probabilities b1, b2 in [0, 0.5).
absl::StatusOr<double> ComposeFlipProbability(BoolOp op, bool t1, bool t2,
                                              double b1, double b2);

enum class BoundOp { kAndOr, kXor };

// Fairness bound of a two-predicate composition from the children's alpha_k
// and minimum absolute biases bmin_k:
//   and/or: a1 + b1 + a2 + b2 - (a1 + b1)(a2 + b2) - b1 b2
//   xor:    a1 (1 - 2 b2) + a2 (1 - 2 b1) - 2 a1 a2
absl::StatusOr<double> ComposeFairnessBound(BoundOp op, double alpha1,
                                            double alpha2, double bmin1,
                                            double bmin2);

// Truth assignment with the largest flip probability under equal child
// biases: (True, True) for And, (False, False) for Or.
absl::StatusOr<std::pair<bool, bool>> WorstTruthAssignment(BoolOp op);

const char* BiasModeName(BiasMode mode);
const char* SamplingName(Sampling sampling);

}  // namespace dpfair

#endif  // DPFAIR_FAIRNESS_H_
