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

#include "dpfair/problems.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpfair {
namespace {

absl::Status CheckAllotmentShape(const AllotmentProblem& problem,
                                 const Dataset& data, size_t attr) {
  if (problem.weights().size() != data.num_entities()) {
    return absl::InvalidArgumentError(
        absl::StrCat("allotment has ", problem.weights().size(),
                     " weights for ", data.num_entities(), " entities"));
  }
  if (attr >= data.num_attributes()) {
    return absl::OutOfRangeError(
        absl::StrCat("attribute index ", attr, " out of range"));
  }
  return absl::OkStatus();
}

absl::Status NonPositiveNormalizer(double z) {
  return absl::FailedPreconditionError(absl::StrCat(
      "allotment normalizer Z = ", z,
      " is not positive; clip the release or use a fixed normalizer"));
}

}  // namespace

absl::StatusOr<AllotmentProblem> AllotmentProblem::Create(
    std::vector<double> weights, Normalizer normalizer) {
  if (weights.empty()) {
    return absl::InvalidArgumentError("allotment needs at least one weight");
  }
  for (double a : weights) {
    if (!(a > 0) || !std::isfinite(a)) {
      return absl::InvalidArgumentError(
          absl::StrCat("allotment weights must be positive, got ", a));
    }
  }
  if (const auto* f = std::get_if<FixedConstant>(&normalizer)) {
    if (!(f->z > 0) || !std::isfinite(f->z)) {
      return absl::InvalidArgumentError(
          absl::StrCat("fixed normalizer must be positive, got ", f->z));
    }
  }
  return AllotmentProblem(std::move(weights), normalizer);
}

AllotmentProblem AllotmentProblem::Uniform(size_t n, Normalizer normalizer) {
  return AllotmentProblem(std::vector<double>(n, 1.0), normalizer);
}

double AllotmentProblem::max_weight() const {
  return *std::max_element(weights_.begin(), weights_.end());
}

double WeightedTotal(std::span<const double> weights, const Dataset& data,
                     size_t attr) {
  double z = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    z += weights[i] * data.at(i, attr);
  }
  return z;
}

absl::StatusOr<ProblemOutput> EvalAllotment(const AllotmentProblem& problem,
                                            const Dataset& data, size_t attr) {
  if (auto s = CheckAllotmentShape(problem, data, attr); !s.ok()) return s;
  const auto& a = problem.weights();
  double z;
  if (const auto* f = std::get_if<FixedConstant>(&problem.normalizer())) {
    z = f->z;
  } else {
    z = WeightedTotal(a, data, attr);
    if (!(z > 0)) return NonPositiveNormalizer(z);
  }
  ProblemOutput out;
  out.kind = OutputKind::kAllotment;
  out.values.resize(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    out.values[i] = a[i] * data.at(i, attr) / z;
  }
  return out;
}

absl::StatusOr<double> HessianTracePf(const AllotmentProblem& problem,
                                      const Dataset& data, size_t attr,
                                      size_t entity) {
  if (auto s = CheckAllotmentShape(problem, data, attr); !s.ok()) return s;
  if (!problem.data_dependent()) {
    // Linear in x: all second derivatives vanish.
    return 0.0;
  }
  if (entity >= data.num_entities()) {
    return absl::OutOfRangeError(
        absl::StrCat("entity index ", entity, " out of range"));
  }
  const auto& a = problem.weights();
  const double z = WeightedTotal(a, data, attr);
  if (!(z > 0)) return NonPositiveNormalizer(z);
  double sum_sq = 0;
  for (double w : a) sum_sq += w * w;
  const double ai = a[entity];
  const double xi = data.at(entity, attr);
  return 2.0 * ai * (xi * sum_sq - ai * z) / (z * z * z);
}

absl::StatusOr<double> PfSensitivity(double max_weight, double lower_bound) {
  if (!(max_weight > 0) || !std::isfinite(max_weight)) {
    return absl::InvalidArgumentError(
        absl::StrCat("a_max must be positive, got ", max_weight));
  }
  if (!(lower_bound > 0) || !std::isfinite(lower_bound)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "public lower bound L must be positive, got ", lower_bound));
  }
  return 2.0 * max_weight / lower_bound;
}

absl::StatusOr<ProblemEvaluator> ProblemEvaluator::Create(
    const Problem& problem, const Dataset& layout) {
  if (const auto* t = std::get_if<AllotmentTask>(&problem)) {
    if (auto s = CheckAllotmentShape(t->problem, layout, t->attribute);
        !s.ok()) {
      return s;
    }
    return ProblemEvaluator(problem, OutputKind::kAllotment);
  }
  if (const auto* t = std::get_if<AffineProblem>(&problem)) {
    if (t->attribute >= layout.num_attributes()) {
      return absl::OutOfRangeError(
          absl::StrCat("attribute index ", t->attribute, " out of range"));
    }
    return ProblemEvaluator(problem, OutputKind::kScalar);
  }
  const auto& d = std::get<DecisionTask>(problem);
  auto bound = BoundPredicate::Bind(d.predicate, layout.attributes());
  if (!bound.ok()) return bound.status();
  ProblemEvaluator ev(problem, OutputKind::kDecision);
  ev.bound_ = *std::move(bound);
  return ev;
}

absl::Status ProblemEvaluator::Evaluate(const Dataset& data,
                                        std::span<double> out,
                                        std::span<char> degenerate) const {
  const size_t n = data.num_entities();
  if (out.size() != n) {
    return absl::InvalidArgumentError("output span has the wrong length");
  }
  if (const auto* t = std::get_if<AllotmentTask>(&problem_)) {
    const auto& a = t->problem.weights();
    double z;
    if (const auto* f =
            std::get_if<FixedConstant>(&t->problem.normalizer())) {
      z = f->z;
    } else {
      z = WeightedTotal(a, data, t->attribute);
      if (!(z > 0)) return NonPositiveNormalizer(z);
    }
    for (size_t i = 0; i < n; ++i) out[i] = a[i] * data.at(i, t->attribute) / z;
    return absl::OkStatus();
  }
  if (const auto* t = std::get_if<AffineProblem>(&problem_)) {
    for (size_t i = 0; i < n; ++i) {
      out[i] = t->slope * data.at(i, t->attribute) + t->intercept;
    }
    return absl::OkStatus();
  }
  for (size_t i = 0; i < n; ++i) {
    const Decision d = bound_->Evaluate(data.row(i));
    out[i] = d.value ? 1.0 : 0.0;
    if (!degenerate.empty()) degenerate[i] = d.degenerate;
  }
  return absl::OkStatus();
}

absl::StatusOr<ProblemOutput> Evaluate(const Problem& problem,
                                       const Dataset& data) {
  auto ev = ProblemEvaluator::Create(problem, data);
  if (!ev.ok()) return ev.status();
  ProblemOutput out;
  out.kind = ev->kind();
  out.values.resize(data.num_entities());
  std::vector<char> degenerate(data.num_entities(), 0);
  if (auto s = ev->Evaluate(data, out.values, degenerate); !s.ok()) return s;
  if (out.kind == OutputKind::kDecision) {
    out.degenerate.assign(degenerate.begin(), degenerate.end());
  }
  return out;
}

}  // namespace dpfair
