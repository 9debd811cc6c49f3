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

#include "dpfair/fairness.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dpfair {
namespace {

absl::Status CheckProbability(double b, const char* name) {
  if (!(b >= 0 && b < 0.5)) {
    return absl::InvalidArgumentError(absl::StrCat(
        name, " must lie in [0, 0.5) (non-trivial mechanism), got ", b));
  }
  return absl::OkStatus();
}

}  // namespace

const char* BiasModeName(BiasMode mode) {
  return mode == BiasMode::kSigned ? "signed" : "absolute";
}

const char* SamplingName(Sampling sampling) {
  return sampling == Sampling::kIndependent ? "independent" : "antithetic";
}

void ComputeDisparities(FairnessReport& report) {
  const auto value = [&](const BiasEstimate& e) {
    return report.mode == BiasMode::kSigned ? e.bias : e.absolute_bias;
  };
  report.disparity.assign(report.per_entity.size(), 0.0);
  report.alpha = 0;
  if (report.per_entity.empty()) return;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& e : report.per_entity) {
    lo = std::min(lo, value(e));
    hi = std::max(hi, value(e));
  }
  for (size_t i = 0; i < report.per_entity.size(); ++i) {
    const double v = value(report.per_entity[i]);
    report.disparity[i] = std::max(v - lo, hi - v);
  }
  report.alpha = hi - lo;
}

double PooledStdError(const FairnessReport& report) {
  double sum_sq = 0;
  for (const auto& e : report.per_entity) sum_sq += e.std_error * e.std_error;
  return std::sqrt(sum_sq);
}

FairnessReport BuildReport(const std::vector<std::string>& entity_ids,
                           std::span<const double> truth,
                           const MonteCarloResult& mc, BiasMode mode,
                           const ReportConfig& config,
                           const std::vector<bool>& keep) {
  FairnessReport report;
  report.mode = mode;
  report.config = config;
  const double m = static_cast<double>(mc.samples);
  for (size_t i = 0; i < truth.size(); ++i) {
    if (!keep.empty() && !keep[i]) continue;
    const EntityMoments& em = mc.entities[i];
    BiasEstimate e;
    e.entity_id = entity_ids[i];
    e.true_value = truth[i];
    e.bias = em.deviation.mean();
    e.expected_private_value = truth[i] + e.bias;
    e.absolute_bias = std::fabs(e.bias);
    e.std_error = em.deviation.std_error();
    e.mean_abs_error = em.abs_deviation.mean();
    e.samples = mc.samples;
    e.degenerate_rate = static_cast<double>(em.degenerate_draws) / m;
    report.per_entity.push_back(std::move(e));
  }
  ComputeDisparities(report);
  return report;
}

absl::StatusOr<FairnessReport> EmpiricalBias(const Problem& problem,
                                             const Dataset& data,
                                             const PrivacySpec& spec,
                                             const AuditOptions& options) {
  std::vector<double> sens(data.num_attributes(), spec.sensitivity());
  return EmpiricalBias(problem, data, spec.epsilon(), sens, options);
}

absl::StatusOr<FairnessReport> EmpiricalBias(
    const Problem& problem, const Dataset& data, double epsilon,
    std::span<const double> sensitivities, const AuditOptions& options) {
  if (!data.is_raw()) {
    return absl::FailedPreconditionError(
        "bias is measured against raw data; got a released dataset");
  }
  if (auto s = ValidateEstimatorOptions(options.estimator); !s.ok()) return s;
  if (sensitivities.size() != data.num_attributes()) {
    return absl::InvalidArgumentError("one sensitivity per attribute needed");
  }
  std::vector<double> scales(sensitivities.size());
  for (size_t j = 0; j < scales.size(); ++j) {
    auto ps = PrivacySpec::Create(epsilon, sensitivities[j]);
    if (!ps.ok()) return ps.status();
    scales[j] = ps->scale();
  }
  for (const auto& step : options.pipeline) {
    if (auto s = ValidateStep(step); !s.ok()) return s;
  }
  auto evaluator = ProblemEvaluator::Create(problem, data);
  if (!evaluator.ok()) return evaluator.status();
  const bool decision = evaluator->kind() == OutputKind::kDecision;
  if (options.true_positives_only && !decision) {
    return absl::InvalidArgumentError(
        "true-positive filtering applies to decision rules only");
  }

  const size_t n = data.num_entities();
  std::vector<double> truth(n);
  if (auto s = evaluator->Evaluate(data, truth); !s.ok()) return s;

  const ProblemEvaluator& ev = *evaluator;
  const TrialFactory factory = [&]() -> TrialFn {
    struct Scratch {
      Dataset work;
      std::vector<double> noise;
      std::vector<double> out;
      std::vector<char> degenerate;
    };
    auto scratch = std::make_shared<Scratch>(Scratch{
        data.WithReleasedValues(
            std::vector<double>(data.values().begin(), data.values().end())),
        std::vector<double>(data.values().size()), std::vector<double>(n),
        std::vector<char>(n)});
    return [&, scratch](RngStream& rng, std::span<double> first,
                        std::span<double> second,
                        std::span<int64_t> degenerate) -> absl::Status {
      Scratch& sc = *scratch;
      const size_t k = scales.size();
      for (size_t c = 0; c < sc.noise.size(); ++c) {
        sc.noise[c] = DrawLaplace(scales[c % k], rng);
      }
      const auto raw = data.values();
      auto run = [&](double sign, std::span<double> dev) -> absl::Status {
        auto cells = sc.work.mutable_values();
        for (size_t c = 0; c < cells.size(); ++c) {
          cells[c] = raw[c] + sign * sc.noise[c];
        }
        if (auto s = ApplyPipeline(options.pipeline, sc.work, rng); !s.ok()) {
          return s;
        }
        std::fill(sc.degenerate.begin(), sc.degenerate.end(), 0);
        if (auto s = ev.Evaluate(sc.work, sc.out, sc.degenerate); !s.ok()) {
          return s;
        }
        if (options.project_outputs_to) {
          sc.out = ProjectSumValues(sc.out, *options.project_outputs_to);
        }
        for (size_t i = 0; i < n; ++i) {
          dev[i] = sc.out[i] - truth[i];
          degenerate[i] += sc.degenerate[i];
        }
        return absl::OkStatus();
      };
      if (auto s = run(1.0, first); !s.ok()) return s;
      if (!second.empty()) return run(-1.0, second);
      return absl::OkStatus();
    };
  };

  auto mc = RunMonteCarlo(n, options.estimator, factory);
  if (!mc.ok()) return mc.status();

  const BiasMode mode = options.mode.value_or(decision ? BiasMode::kAbsolute
                                                       : BiasMode::kSigned);
  const ReportConfig config{epsilon,
                            sensitivities.empty() ? 1.0 : sensitivities[0],
                            options.estimator.samples,
                            options.estimator.master_seed,
                            options.estimator.shard_count,
                            options.estimator.sampling};
  std::vector<bool> keep;
  if (options.true_positives_only) {
    keep.resize(n);
    for (size_t i = 0; i < n; ++i) keep[i] = truth[i] == 1.0;
  }
  FairnessReport report =
      BuildReport(data.entity_ids(), truth, *mc, mode, config, keep);
  report.metadata["pipeline"] = PipelineToJson(options.pipeline);
  report.metadata["stream_id"] = options.estimator.stream_id;
  report.metadata["trials"] = mc->trials;
  if (options.project_outputs_to) {
    report.metadata["project_outputs_to"] = *options.project_outputs_to;
  }
  if (options.true_positives_only) {
    report.metadata["true_positives_only"] = true;
  }
  return report;
}

absl::StatusOr<double> TaylorBias(const AllotmentProblem& problem,
                                  const Dataset& data, size_t attr,
                                  const PrivacySpec& spec, size_t entity,
                                  double coefficient) {
  auto trace = HessianTracePf(problem, data, attr, entity);
  if (!trace.ok()) return trace.status();
  const double variance = 2.0 * spec.scale() * spec.scale();
  return 0.5 * coefficient * variance * *trace;
}

absl::StatusOr<TaylorCalibration> CalibrateTaylorCoefficient(
    const AllotmentProblem& problem, const Dataset& data, size_t attr,
    const PrivacySpec& spec, const EstimatorOptions& estimator) {
  AuditOptions options;
  options.estimator = estimator;
  options.mode = BiasMode::kSigned;
  auto mc = EmpiricalBias(AllotmentTask{problem, attr}, data, spec, options);
  if (!mc.ok()) return mc.status();
  TaylorCalibration out;
  out.candidates = {1.0, static_cast<double>(data.num_entities())};
  for (double c : out.candidates) {
    double chi = 0;
    double worst = 0;
    for (size_t i = 0; i < data.num_entities(); ++i) {
      auto t = TaylorBias(problem, data, attr, spec, i, c);
      if (!t.ok()) return t.status();
      const auto& e = mc->per_entity[i];
      const double z = (*t - e.bias) / std::max(e.std_error, 1e-300);
      chi += z * z;
      worst = std::max(worst, std::fabs(z));
    }
    out.chi_square.push_back(chi);
    out.max_abs_z.push_back(worst);
  }
  out.chosen = out.chi_square[0] <= out.chi_square[1] ? out.candidates[0]
                                                      : out.candidates[1];
  out.monte_carlo = *std::move(mc);
  out.monte_carlo.metadata["taylor_candidates"] = out.candidates;
  out.monte_carlo.metadata["taylor_chi_square"] = out.chi_square;
  out.monte_carlo.metadata["taylor_coefficient"] = out.chosen;
  return out;
}

absl::StatusOr<double> ThresholdBiasClosedForm(double x, double level,
                                               double scale) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive, got ", scale));
  }
  return 0.5 * std::exp(-std::fabs(x - level) / scale);
}

absl::StatusOr<double> ComposeFlipProbability(BoolOp op, bool t1, bool t2,
                                              double b1, double b2) {
  if (auto s = CheckProbability(b1, "b1"); !s.ok()) return s;
  if (auto s = CheckProbability(b2, "b2"); !s.ok()) return s;
  const double both = b1 * b2;
  const double either = b1 + b2 - b1 * b2;
  switch (op) {
    case BoolOp::kAnd:
      if (!t1 && !t2) return both;
      if (!t1 && t2) return b1 * (1 - b2);
      if (t1 && !t2) return (1 - b1) * b2;
      return either;
    case BoolOp::kOr:
      if (!t1 && !t2) return either;
      if (!t1 && t2) return (1 - b1) * b2;
      if (t1 && !t2) return b1 * (1 - b2);
      return both;
    case BoolOp::kXor:
      return b1 + b2 - 2 * b1 * b2;
  }
  return absl::InvalidArgumentError("unknown operator");
}

absl::StatusOr<double> ComposeFairnessBound(BoundOp op, double alpha1,
                                            double alpha2, double bmin1,
                                            double bmin2) {
  for (double v : {alpha1, alpha2, bmin1, bmin2}) {
    if (!(v >= 0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("fairness bound inputs must be nonnegative, got ", v));
    }
  }
  if (!(alpha1 + bmin1 < 0.5) || !(alpha2 + bmin2 < 0.5)) {
    return absl::InvalidArgumentError(
        "each child needs alpha + bmin < 0.5 (non-trivial mechanism)");
  }
  if (op == BoundOp::kXor) {
    return alpha1 * (1 - 2 * bmin2) + alpha2 * (1 - 2 * bmin1) -
           2 * alpha1 * alpha2;
  }
  const double top1 = alpha1 + bmin1;
  const double top2 = alpha2 + bmin2;
  return top1 + top2 - top1 * top2 - bmin1 * bmin2;
}

absl::StatusOr<std::pair<bool, bool>> WorstTruthAssignment(BoolOp op) {
  switch (op) {
    case BoolOp::kAnd:
      return std::pair{true, true};
    case BoolOp::kOr:
      return std::pair{false, false};
    case BoolOp::kXor:
      break;
  }
  return absl::InvalidArgumentError(
      "xor flips with the same probability under every truth assignment");
}

}  // namespace dpfair
