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

#include "dpfair/mitigation.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "Eigen/Dense"
#include "absl/strings/str_cat.h"
#include "dpfair/mechanisms.h"

namespace dpfair {
namespace {

absl::Status CheckWeights(std::span<const double> weights, const Dataset& data,
                          size_t attr) {
  if (attr >= data.num_attributes()) {
    return absl::OutOfRangeError(
        absl::StrCat("attribute index ", attr, " out of range"));
  }
  if (weights.size() != data.num_entities()) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", data.num_entities(), " weights, got ",
                     weights.size()));
  }
  for (double a : weights) {
    if (!std::isfinite(a) || a <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("weights must be positive and finite, got ", a));
    }
  }
  return absl::OkStatus();
}

double MaxOf(std::span<const double> v) {
  return *std::max_element(v.begin(), v.end());
}

ReportConfig ConfigFor(double epsilon, double sensitivity,
                       const EstimatorOptions& est) {
  return ReportConfig{epsilon,         sensitivity,     est.samples,
                      est.master_seed, est.shard_count, est.sampling};
}

}  // namespace

absl::StatusOr<RedundantRelease> ReleaseWithRedundantZ(
    const Dataset& data, size_t attr, std::span<const double> weights,
    double epsilon, RngStream& rng) {
  if (!data.is_raw()) {
    return absl::FailedPreconditionError("release needs raw data");
  }
  if (auto s = CheckWeights(weights, data, attr); !s.ok()) return s;
  auto halves = SplitBudget(epsilon, std::vector<double>{0.5, 0.5});
  if (!halves.ok()) return halves.status();
  const double a_max = MaxOf(weights);
  auto count_spec = PrivacySpec::Create((*halves)[0], 1.0);
  if (!count_spec.ok()) return count_spec.status();
  auto z_spec = PrivacySpec::Create((*halves)[1], a_max);
  if (!z_spec.ok()) return z_spec.status();

  auto column = Dataset::Create(data.entity_ids(), {data.attributes()[attr]},
                                data.Column(attr), DataKind::kRaw);
  if (!column.ok()) return column.status();
  auto noisy = Release(*column, *count_spec, rng);
  if (!noisy.ok()) return noisy.status();
  const double z = WeightedTotal(weights, data, attr);
  RedundantRelease out{std::move(*noisy), z + DrawLaplace(z_spec->scale(), rng),
                       (*halves)[0], (*halves)[1], a_max};
  return out;
}

absl::StatusOr<ProblemOutput> LinearProxyAllotment(
    const RedundantRelease& release, std::span<const double> weights,
    size_t attr) {
  const Dataset& counts = release.noisy_counts;
  if (attr >= counts.num_attributes()) {
    return absl::OutOfRangeError(
        absl::StrCat("attribute index ", attr, " out of range"));
  }
  if (weights.size() != counts.num_entities()) {
    return absl::InvalidArgumentError("one weight per entity needed");
  }
  if (!(release.noisy_normalizer > 0)) {
    return absl::FailedPreconditionError(
        absl::StrCat("released normalizer is not positive: ",
                     release.noisy_normalizer));
  }
  ProblemOutput out;
  out.kind = OutputKind::kAllotment;
  out.values.resize(counts.num_entities());
  for (size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = weights[i] * counts.at(i, attr) / release.noisy_normalizer;
  }
  return out;
}

double DefaultNormalizerLowerBound(std::span<const double> weights,
                                   const Dataset& data, size_t attr) {
  return 0.9 * WeightedTotal(weights, data, attr);
}

absl::StatusOr<ProblemOutput> OutputPerturbationPf(
    const Dataset& data, size_t attr, std::span<const double> weights,
    double epsilon, std::optional<double> lower_bound, RngStream& rng) {
  if (!data.is_raw()) {
    return absl::FailedPreconditionError("release needs raw data");
  }
  if (auto s = CheckWeights(weights, data, attr); !s.ok()) return s;
  const double z = WeightedTotal(weights, data, attr);
  if (!(z > 0)) {
    return absl::FailedPreconditionError(
        absl::StrCat("weighted total must be positive, got ", z));
  }
  const double l =
      lower_bound.value_or(DefaultNormalizerLowerBound(weights, data, attr));
  if (l > z) {
    return absl::InvalidArgumentError(absl::StrCat(
        "lower bound ", l, " exceeds the weighted total ", z));
  }
  auto sens = PfSensitivity(MaxOf(weights), l);
  if (!sens.ok()) return sens.status();
  auto spec = PrivacySpec::Create(epsilon, *sens);
  if (!spec.ok()) return spec.status();
  ProblemOutput out;
  out.kind = OutputKind::kAllotment;
  out.values.resize(data.num_entities());
  for (size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] =
        weights[i] * data.at(i, attr) / z + DrawLaplace(spec->scale(), rng);
  }
  return out;
}

absl::StatusOr<FairnessReport> AuditLinearProxy(
    const Dataset& data, size_t attr, std::span<const double> weights,
    double epsilon, std::optional<double> fixed_noisy_normalizer,
    const EstimatorOptions& estimator) {
  if (!data.is_raw()) {
    return absl::FailedPreconditionError("audit needs raw data");
  }
  if (auto s = CheckWeights(weights, data, attr); !s.ok()) return s;
  if (auto s = ValidateEstimatorOptions(estimator); !s.ok()) return s;
  auto count_spec = PrivacySpec::Create(epsilon / 2, 1.0);
  if (!count_spec.ok()) return count_spec.status();
  auto z_spec = PrivacySpec::Create(epsilon / 2, MaxOf(weights));
  if (!z_spec.ok()) return z_spec.status();
  if (fixed_noisy_normalizer && !(*fixed_noisy_normalizer > 0)) {
    return absl::FailedPreconditionError(
        absl::StrCat("released normalizer is not positive: ",
                     *fixed_noisy_normalizer));
  }

  const size_t n = data.num_entities();
  const double z = WeightedTotal(weights, data, attr);
  const std::vector<double> x = data.Column(attr);
  const double denom = fixed_noisy_normalizer.value_or(z);
  std::vector<double> truth(n);
  for (size_t i = 0; i < n; ++i) truth[i] = weights[i] * x[i] / denom;

  const double count_scale = count_spec->scale();
  const double z_scale = z_spec->scale();
  const bool conditional = fixed_noisy_normalizer.has_value();
  const TrialFactory factory = [&]() -> TrialFn {
    auto noise = std::make_shared<std::vector<double>>(n);
    return [&, noise](RngStream& rng, std::span<double> first,
                      std::span<double> second,
                      std::span<int64_t>) -> absl::Status {
      std::vector<double>& eta = *noise;
      for (size_t i = 0; i < n; ++i) eta[i] = DrawLaplace(count_scale, rng);
      const double zeta = conditional ? 0.0 : DrawLaplace(z_scale, rng);
      auto run = [&](double sign, std::span<double> dev) -> absl::Status {
        const double zt = conditional ? denom : z + sign * zeta;
        if (!(zt > 0)) {
          return absl::FailedPreconditionError(
              absl::StrCat("released normalizer is not positive: ", zt));
        }
        for (size_t i = 0; i < n; ++i) {
          dev[i] = weights[i] * (x[i] + sign * eta[i]) / zt - truth[i];
        }
        return absl::OkStatus();
      };
      if (auto s = run(1.0, first); !s.ok()) return s;
      if (!second.empty()) return run(-1.0, second);
      return absl::OkStatus();
    };
  };
  auto mc = RunMonteCarlo(n, estimator, factory);
  if (!mc.ok()) return mc.status();
  FairnessReport report =
      BuildReport(data.entity_ids(), truth, *mc, BiasMode::kSigned,
                  ConfigFor(epsilon, 1.0, estimator));
  report.metadata["mechanism"] = "linear_proxy";
  report.metadata["audit"] = conditional ? "conditional" : "marginal";
  if (conditional) report.metadata["noisy_normalizer"] = denom;
  report.metadata["stream_id"] = estimator.stream_id;
  return report;
}

absl::StatusOr<FairnessReport> AuditOutputPerturbation(
    const Dataset& data, size_t attr, std::span<const double> weights,
    double epsilon, std::optional<double> lower_bound,
    const EstimatorOptions& estimator) {
  if (!data.is_raw()) {
    return absl::FailedPreconditionError("audit needs raw data");
  }
  if (auto s = CheckWeights(weights, data, attr); !s.ok()) return s;
  if (auto s = ValidateEstimatorOptions(estimator); !s.ok()) return s;
  const size_t n = data.num_entities();
  const double z = WeightedTotal(weights, data, attr);
  if (!(z > 0)) {
    return absl::FailedPreconditionError(
        absl::StrCat("weighted total must be positive, got ", z));
  }
  const double l =
      lower_bound.value_or(DefaultNormalizerLowerBound(weights, data, attr));
  if (l > z) {
    return absl::InvalidArgumentError(absl::StrCat(
        "lower bound ", l, " exceeds the weighted total ", z));
  }
  auto sens = PfSensitivity(MaxOf(weights), l);
  if (!sens.ok()) return sens.status();
  auto spec = PrivacySpec::Create(epsilon, *sens);
  if (!spec.ok()) return spec.status();
  std::vector<double> truth(n);
  for (size_t i = 0; i < n; ++i) truth[i] = weights[i] * data.at(i, attr) / z;

  const double scale = spec->scale();
  const TrialFactory factory = [&]() -> TrialFn {
    return [&](RngStream& rng, std::span<double> first,
               std::span<double> second, std::span<int64_t>) -> absl::Status {
      for (size_t i = 0; i < n; ++i) {
        const double eta = DrawLaplace(scale, rng);
        first[i] = eta;
        if (!second.empty()) second[i] = -eta;
      }
      return absl::OkStatus();
    };
  };
  auto mc = RunMonteCarlo(n, estimator, factory);
  if (!mc.ok()) return mc.status();
  FairnessReport report =
      BuildReport(data.entity_ids(), truth, *mc, BiasMode::kSigned,
                  ConfigFor(epsilon, *sens, estimator));
  report.metadata["mechanism"] = "output_perturbation";
  report.metadata["lower_bound"] = l;
  report.metadata["stream_id"] = estimator.stream_id;
  return report;
}

absl::StatusOr<std::vector<double>> PartitionGroups(
    std::span<const double> released_values, int groups) {
  const size_t n = released_values.size();
  if (groups < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("group count must be >= 1, got ", groups));
  }
  if (static_cast<size_t>(groups) > n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot form ", groups, " groups from ", n, " entities"));
  }
  std::vector<double> sorted(released_values.begin(), released_values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts;
  for (int g = 1; g < groups; ++g) {
    const double c = sorted[static_cast<size_t>(g) * n / groups];
    if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
  }
  return cuts;
}

size_t GroupOf(std::span<const double> breakpoints, double value) {
  return static_cast<size_t>(
      std::upper_bound(breakpoints.begin(), breakpoints.end(), value) -
      breakpoints.begin());
}

double LinearPiece::Score(std::span<const double> features) const {
  double s = intercept;
  for (size_t k = 0; k < coefficients.size(); ++k) {
    s += coefficients[k] * (features[k] - feature_mean[k]) / feature_scale[k];
  }
  return s;
}

absl::StatusOr<BoundProxy> BoundProxy::Bind(
    const PiecewiseProxy& proxy, const std::vector<std::string>& attributes) {
  auto find = [&](const std::string& name) -> absl::StatusOr<size_t> {
    auto it = std::find(attributes.begin(), attributes.end(), name);
    if (it == attributes.end()) {
      return absl::NotFoundError(absl::StrCat("unknown attribute '", name, "'"));
    }
    return static_cast<size_t>(it - attributes.begin());
  };
  if (proxy.pieces.size() != proxy.breakpoints.size() + 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("proxy has ", proxy.pieces.size(), " pieces for ",
                     proxy.breakpoints.size(), " breakpoints"));
  }
  for (const auto& p : proxy.pieces) {
    if (p.coefficients.size() != proxy.features.size() ||
        p.feature_mean.size() != proxy.features.size() ||
        p.feature_scale.size() != proxy.features.size()) {
      return absl::InvalidArgumentError("piece size does not match features");
    }
  }
  BoundProxy b;
  b.proxy_ = &proxy;
  auto g = find(proxy.grouping_attribute);
  if (!g.ok()) return g.status();
  b.grouping_index_ = *g;
  for (const auto& f : proxy.features) {
    auto idx = find(f);
    if (!idx.ok()) return idx.status();
    b.feature_index_.push_back(*idx);
  }
  return b;
}

size_t BoundProxy::Group(std::span<const double> row) const {
  return GroupOf(proxy_->breakpoints, row[grouping_index_]);
}

bool BoundProxy::Decide(std::span<const double> row) const {
  const LinearPiece& piece = proxy_->pieces[Group(row)];
  double s = piece.intercept;
  for (size_t k = 0; k < feature_index_.size(); ++k) {
    s += piece.coefficients[k] *
         (row[feature_index_[k]] - piece.feature_mean[k]) /
         piece.feature_scale[k];
  }
  return s > piece.threshold;
}

namespace {

LinearPiece FitLeastSquares(const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& y) {
  const Eigen::Index d = x.cols();
  Eigen::MatrixXd design(x.rows(), d + 1);
  design.leftCols(d) = x;
  design.col(d).setOnes();
  Eigen::MatrixXd gram = design.transpose() * design;
  const double ridge = 1e-6 * std::max(gram.trace(), 1.0);
  gram.diagonal().array() += ridge;
  const Eigen::VectorXd beta = gram.ldlt().solve(design.transpose() * y);
  LinearPiece p;
  p.coefficients.assign(beta.data(), beta.data() + d);
  p.intercept = beta(d);
  p.threshold = 0.5;
  return p;
}

LinearPiece FitHinge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01,
                     const PiecewiseFitOptions& options) {
  const Eigen::Index d = x.cols();
  const double rows = static_cast<double>(x.rows());
  const Eigen::VectorXd y = 2.0 * y01.array() - 1.0;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0;
  for (int epoch = 1; epoch <= options.hinge_epochs; ++epoch) {
    const double lr = options.hinge_learning_rate / std::sqrt(epoch);
    const Eigen::VectorXd margin =
        y.array() * ((x * w).array() + b);
    Eigen::VectorXd gw = options.hinge_l2 * w;
    double gb = 0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      if (margin(r) < 1) {
        gw -= y(r) * x.row(r).transpose() / rows;
        gb -= y(r) / rows;
      }
    }
    w -= lr * gw;
    b -= lr * gb;
  }
  LinearPiece p;
  p.coefficients.assign(w.data(), w.data() + d);
  p.intercept = b;
  p.threshold = 0;
  return p;
}

}  // namespace

absl::StatusOr<PiecewiseProxy> FitPiecewiseProxy(
    const Dataset& train, std::span<const int> labels,
    std::span<const double> breakpoints, const PiecewiseFitOptions& options) {
  const size_t n = train.num_entities();
  if (labels.size() != n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", n, " labels, got ", labels.size()));
  }
  if (n == 0) return absl::InvalidArgumentError("empty training set");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    return absl::InvalidArgumentError("breakpoints must be sorted");
  }
  if (options.features.empty()) {
    return absl::InvalidArgumentError("proxy needs at least one feature");
  }
  auto gi = train.AttributeIndex(options.grouping_attribute);
  if (!gi.ok()) return gi.status();
  std::vector<size_t> fi;
  for (const auto& f : options.features) {
    auto idx = train.AttributeIndex(f);
    if (!idx.ok()) return idx.status();
    fi.push_back(*idx);
  }
  const size_t d = fi.size();

  PiecewiseProxy proxy;
  proxy.grouping_attribute = options.grouping_attribute;
  proxy.features = options.features;
  proxy.breakpoints.assign(breakpoints.begin(), breakpoints.end());
  proxy.method = options.method;

  const size_t num_groups = breakpoints.size() + 1;
  std::vector<std::vector<size_t>> members(num_groups);
  for (size_t i = 0; i < n; ++i) {
    members[GroupOf(breakpoints, train.at(i, *gi))].push_back(i);
  }
  const double positive_rate =
      std::accumulate(labels.begin(), labels.end(), 0.0) /
      static_cast<double>(n);

  for (size_t g = 0; g < num_groups; ++g) {
    const auto& rows = members[g];
    LinearPiece piece;
    std::vector<double> mean(d, 0.0), scale(d, 1.0);
    if (rows.empty()) {
      // No training data: predict the overall majority label.
      piece.coefficients.assign(d, 0.0);
      piece.threshold = options.method == FitMethod::kLeastSquares ? 0.5 : 0.0;
      piece.intercept = options.method == FitMethod::kLeastSquares
                            ? positive_rate
                            : 2 * positive_rate - 1;
      piece.feature_mean = mean;
      piece.feature_scale = scale;
      proxy.pieces.push_back(std::move(piece));
      continue;
    }
    const double m = static_cast<double>(rows.size());
    for (size_t k = 0; k < d; ++k) {
      double s = 0, ss = 0;
      for (size_t r : rows) s += train.at(r, fi[k]);
      mean[k] = s / m;
      for (size_t r : rows) {
        const double c = train.at(r, fi[k]) - mean[k];
        ss += c * c;
      }
      const double sd = std::sqrt(ss / m);
      scale[k] = sd > 0 ? sd : 1.0;
    }
    Eigen::MatrixXd x(rows.size(), d);
    Eigen::VectorXd y(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
      for (size_t k = 0; k < d; ++k) {
        x(r, k) = (train.at(rows[r], fi[k]) - mean[k]) / scale[k];
      }
      y(r) = labels[rows[r]] != 0 ? 1.0 : 0.0;
    }
    piece = options.method == FitMethod::kLeastSquares
                ? FitLeastSquares(x, y)
                : FitHinge(x, y, options);
    piece.feature_mean = mean;
    piece.feature_scale = scale;
    size_t correct = 0;
    std::vector<double> f(d);
    for (size_t r : rows) {
      for (size_t k = 0; k < d; ++k) f[k] = train.at(r, fi[k]);
      const bool pred = piece.Score(f) > piece.threshold;
      correct += pred == (labels[r] != 0);
    }
    piece.train_size = rows.size();
    piece.train_accuracy = static_cast<double>(correct) / m;
    proxy.pieces.push_back(std::move(piece));
  }
  return proxy;
}

absl::StatusOr<FairnessReport> AuditPiecewiseProxy(
    const PiecewiseProxy& proxy, const Dataset& data, const PrivacySpec& spec,
    const EstimatorOptions& estimator) {
  if (!data.is_raw()) {
    return absl::FailedPreconditionError("audit needs raw data");
  }
  if (auto s = ValidateEstimatorOptions(estimator); !s.ok()) return s;
  auto bound = BoundProxy::Bind(proxy, data.attributes());
  if (!bound.ok()) return bound.status();
  const size_t n = data.num_entities();
  const size_t k = data.num_attributes();
  std::vector<double> truth(n);
  for (size_t i = 0; i < n; ++i) truth[i] = bound->Decide(data.row(i));

  const BoundProxy& bp = *bound;
  const double scale = spec.scale();
  const TrialFactory factory = [&]() -> TrialFn {
    auto buf = std::make_shared<std::vector<double>>(2 * k);
    return [&, buf](RngStream& rng, std::span<double> first,
                    std::span<double> second,
                    std::span<int64_t>) -> absl::Status {
      std::span<double> plus(buf->data(), k), minus(buf->data() + k, k);
      for (size_t i = 0; i < n; ++i) {
        const auto r = data.row(i);
        for (size_t j = 0; j < k; ++j) {
          const double eta = DrawLaplace(scale, rng);
          plus[j] = r[j] + eta;
          minus[j] = r[j] - eta;
        }
        first[i] = static_cast<double>(bp.Decide(plus)) - truth[i];
        if (!second.empty()) {
          second[i] = static_cast<double>(bp.Decide(minus)) - truth[i];
        }
      }
      return absl::OkStatus();
    };
  };
  auto mc = RunMonteCarlo(n, estimator, factory);
  if (!mc.ok()) return mc.status();
  FairnessReport report =
      BuildReport(data.entity_ids(), truth, *mc, BiasMode::kAbsolute,
                  ConfigFor(spec.epsilon(), spec.sensitivity(), estimator));
  report.metadata["mechanism"] = "piecewise_proxy";
  report.metadata["fit_method"] = FitMethodName(proxy.method);
  report.metadata["stream_id"] = estimator.stream_id;
  return report;
}

std::vector<double> GroupAlphas(const FairnessReport& report,
                                std::span<const size_t> group_of_entity,
                                size_t num_groups) {
  std::vector<double> lo(num_groups, INFINITY), hi(num_groups, -INFINITY);
  for (size_t i = 0; i < report.per_entity.size() && i < group_of_entity.size();
       ++i) {
    const size_t g = group_of_entity[i];
    if (g >= num_groups) continue;
    const auto& e = report.per_entity[i];
    const double v = report.mode == BiasMode::kAbsolute ? e.absolute_bias
                                                        : e.bias;
    lo[g] = std::min(lo[g], v);
    hi[g] = std::max(hi[g], v);
  }
  std::vector<double> alpha(num_groups, 0.0);
  for (size_t g = 0; g < num_groups; ++g) {
    if (hi[g] >= lo[g]) alpha[g] = hi[g] - lo[g];
  }
  return alpha;
}

nlohmann::json ProxyToJson(const PiecewiseProxy& proxy) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : proxy.pieces) {
    pieces.push_back({{"coefficients", p.coefficients},
                      {"intercept", p.intercept},
                      {"threshold", p.threshold},
                      {"feature_mean", p.feature_mean},
                      {"feature_scale", p.feature_scale},
                      {"train_accuracy", p.train_accuracy},
                      {"train_size", p.train_size}});
  }
  return {{"grouping_attribute", proxy.grouping_attribute},
          {"features", proxy.features},
          {"breakpoints", proxy.breakpoints},
          {"method", FitMethodName(proxy.method)},
          {"pieces", pieces}};
}

absl::StatusOr<PiecewiseProxy> ProxyFromJson(const nlohmann::json& j) {
  try {
    PiecewiseProxy proxy;
    proxy.grouping_attribute = j.at("grouping_attribute").get<std::string>();
    proxy.features = j.at("features").get<std::vector<std::string>>();
    proxy.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    const std::string method = j.at("method").get<std::string>();
    if (method == "least_squares") {
      proxy.method = FitMethod::kLeastSquares;
    } else if (method == "hinge") {
      proxy.method = FitMethod::kHinge;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown fit method '", method, "'"));
    }
    for (const auto& pj : j.at("pieces")) {
      LinearPiece p;
      p.coefficients = pj.at("coefficients").get<std::vector<double>>();
      p.intercept = pj.at("intercept").get<double>();
      p.threshold = pj.at("threshold").get<double>();
      p.feature_mean = pj.at("feature_mean").get<std::vector<double>>();
      p.feature_scale = pj.at("feature_scale").get<std::vector<double>>();
      p.train_accuracy = pj.value("train_accuracy", 0.0);
      p.train_size = pj.value("train_size", size_t{0});
      proxy.pieces.push_back(std::move(p));
    }
    if (proxy.pieces.size() != proxy.breakpoints.size() + 1) {
      return absl::InvalidArgumentError("pieces and breakpoints disagree");
    }
    return proxy;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed proxy: ", e.what()));
  }
}

absl::StatusOr<CostOfPrivacyReport> CostOfPrivacy(const FairnessReport& report,
                                                  double budget) {
  if (report.mode != BiasMode::kSigned) {
    return absl::InvalidArgumentError(
        "cost of privacy needs a signed-bias report");
  }
  if (!std::isfinite(budget) || budget < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("budget must be finite and nonnegative, got ", budget));
  }
  CostOfPrivacyReport out;
  out.budget = budget;
  for (const auto& e : report.per_entity) {
    const double s = e.bias < 0 ? -e.bias * budget : 0.0;
    out.entity_ids.push_back(e.entity_id);
    out.per_entity_shortfall.push_back(s);
    out.total += s;
  }
  return out;
}

const char* FitMethodName(FitMethod method) {
  switch (method) {
    case FitMethod::kLeastSquares:
      return "least_squares";
    case FitMethod::kHinge:
      return "hinge";
  }
  return "unknown";
}

}  // namespace dpfair
