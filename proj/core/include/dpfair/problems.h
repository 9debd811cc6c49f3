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

#ifndef DPFAIR_PROBLEMS_H_
#define DPFAIR_PROBLEMS_H_

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "dpfair/predicate.h"

namespace dpfair {

// Normalizer Z of a proportional allotment.
struct DataDependent {
  friend bool operator==(const DataDependent&, const DataDependent&) = default;
};
struct FixedConstant {
  double z = 1.0;
  friend bool operator==(const FixedConstant&, const FixedConstant&) = default;
};
using Normalizer = std::variant<DataDependent, FixedConstant>;

// Weighted proportional allotment: share_i = a_i x_i / Z. With a
// DataDependent normalizer Z = sum_j a_j x_j; a FixedConstant normalizer
// makes the map linear in x (the redundant-release proxy).
class AllotmentProblem {
 public:
  static absl::StatusOr<AllotmentProblem> Create(std::vector<double> weights,
                                                 Normalizer normalizer = {});
  // All weights equal to one.
  static AllotmentProblem Uniform(size_t n, Normalizer normalizer = {});

  const std::vector<double>& weights() const { return weights_; }
  const Normalizer& normalizer() const { return normalizer_; }
  bool data_dependent() const {
    return std::holds_alternative<DataDependent>(normalizer_);
  }
  double max_weight() const;

 private:
  AllotmentProblem(std::vector<double> w, Normalizer z)
      : weights_(std::move(w)), normalizer_(z) {}

  std::vector<double> weights_;
  Normalizer normalizer_;
};

enum class OutputKind { kAllotment, kDecision, kScalar };

struct ProblemOutput {
  OutputKind kind = OutputKind::kAllotment;
  // Shares, or 0/1 for decisions.
  std::vector<double> values;
  // Decisions only: a ratio leaf saw a nonpositive denominator.
  std::vector<bool> degenerate;
};

// sum_j a_j x_j over column `attr`.
double WeightedTotal(std::span<const double> weights, const Dataset& data,
                     size_t attr);

// Evaluates the allotment for every entity. A data-dependent normalizer that
// is not strictly positive (possible on released data) is reported as
// FailedPrecondition carrying the offending Z; callers pick clipping or a
// proxy.
absl::StatusOr<ProblemOutput> EvalAllotment(const AllotmentProblem& problem,
                                            const Dataset& data, size_t attr);

// Closed-form trace of the Hessian of share_i with respect to the counts:
//   2 a_i (x_i sum_j a_j^2 - a_i Z) / Z^3,  Z = sum_j a_j x_j.
absl::StatusOr<double> HessianTracePf(const AllotmentProblem& problem,
                                      const Dataset& data, size_t attr,
                                      size_t entity);

// L1 global sensitivity of the allotment vector given a public lower bound
// L <= sum_i a_i x_i: 2 a_max / L.
absl::StatusOr<double> PfSensitivity(double max_weight, double lower_bound);

// P_i(x) = slope * x_i + intercept on one attribute. Zero curvature.
struct AffineProblem {
  size_t attribute = 0;
  double slope = 1.0;
  double intercept = 0.0;
};

struct AllotmentTask {
  AllotmentProblem problem;
  size_t attribute = 0;
};

struct DecisionTask {
  Predicate predicate;
};

// Everything the fairness estimator knows how to audit.
using Problem = std::variant<AllotmentTask, DecisionTask, AffineProblem>;

// A problem bound to a dataset layout, ready for repeated evaluation.
class ProblemEvaluator {
 public:
  static absl::StatusOr<ProblemEvaluator> Create(const Problem& problem,
                                                 const Dataset& layout);

  OutputKind kind() const { return kind_; }

  // Writes one value per entity into `out` (and degeneracy flags into
  // `degenerate` when non-empty).
  absl::Status Evaluate(const Dataset& data, std::span<double> out,
                        std::span<char> degenerate = {}) const;

 private:
  ProblemEvaluator(Problem p, OutputKind kind) : problem_(std::move(p)),
                                                 kind_(kind) {}

  Problem problem_;
  OutputKind kind_;
  std::optional<BoundPredicate> bound_;
};

absl::StatusOr<ProblemOutput> Evaluate(const Problem& problem,
                                       const Dataset& data);

}  // namespace dpfair

#endif  // DPFAIR_PROBLEMS_H_
