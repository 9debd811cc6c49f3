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

#include "dpfair/experiment.h"

#include <algorithm>
#include <filesystem>
#include <set>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "dpfair/mechanisms.h"
#include "dpfair/problems.h"
#include "dpfair/report_io.h"
#include "dpfair/rng.h"
#include "dpfair/synth.h"

namespace dpfair {
namespace {

using json = nlohmann::json;

// Per-epsilon stream layout: epsilon k owns ids [k * kStreamsPerEps, ...).
constexpr uint64_t kStreamsPerEps = 8;
enum StreamSlot : uint64_t {
  kBaseAudit = 0,
  kNormalizerRelease = 1,
  kMitigationAudit = 2,
  kMarginalAudit = 3,
  kTemperatureTuning = 4,
  kProxyRelease = 5,
};

absl::Status ConfigError(absl::string_view where, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(where, ": ", what));
}

absl::Status CheckKeys(const json& j, absl::string_view where,
                       const std::set<std::string>& allowed) {
  if (!j.is_object()) return ConfigError(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      return ConfigError(where, absl::StrCat("unknown field '", key, "'"));
    }
  }
  return absl::OkStatus();
}

const char* StrategyName(MitigationStrategy s) {
  switch (s) {
    case MitigationStrategy::kLinearProxy:
      return "linear_proxy";
    case MitigationStrategy::kOutputPerturbation:
      return "output_perturbation";
    case MitigationStrategy::kTemperature:
      return "temperature";
    case MitigationStrategy::kPiecewiseProxy:
      return "piecewise_proxy";
  }
  return "unknown";
}

absl::StatusOr<DataSource> ParseSource(const json& j) {
  if (auto s = CheckKeys(j, "dataset",
                         {"csv", "schema", "filter_min_count",
                          "filter_minority", "synthetic"});
      !s.ok()) {
    return s;
  }
  if (j.contains("synthetic") == j.contains("csv")) {
    return ConfigError("dataset", "give exactly one of 'csv' or 'synthetic'");
  }
  if (j.contains("synthetic")) {
    const json& spec = j.at("synthetic");
    if (!spec.is_object() || !spec.contains("generator")) {
      return ConfigError("dataset.synthetic", "missing 'generator'");
    }
    const std::string gen = spec.at("generator").get<std::string>();
    if (gen != "power_law" && gen != "linear_ramp" &&
        gen != "minority_counties") {
      return ConfigError("dataset.synthetic",
                         absl::StrCat("unknown generator '", gen, "'"));
    }
    return SyntheticSource{spec};
  }
  CsvSource csv;
  csv.path = j.at("csv").get<std::string>();
  csv.schema = j.value("schema", "allotment");
  if (csv.schema != "allotment" && csv.schema != "minority") {
    return ConfigError("dataset.schema",
                       absl::StrCat("unknown schema '", csv.schema, "'"));
  }
  if (j.contains("filter_min_count")) {
    csv.ingest.min_count = j.at("filter_min_count").get<int64_t>();
  }
  csv.ingest.require_minority_population = j.value("filter_minority", false);
  return csv;
}

absl::StatusOr<ProblemSpec> ParseProblem(const json& j) {
  if (auto s = CheckKeys(j, "problem",
                         {"type", "attribute", "weights", "normalizer",
                          "slope", "intercept", "predicate"});
      !s.ok()) {
    return s;
  }
  ProblemSpec p;
  const std::string type = j.value("type", "allotment");
  if (type == "allotment") {
    p.type = ProblemType::kAllotment;
  } else if (type == "decision") {
    p.type = ProblemType::kDecision;
  } else if (type == "affine") {
    p.type = ProblemType::kAffine;
  } else {
    return ConfigError("problem.type",
                       absl::StrCat("unknown problem type '", type, "'"));
  }
  p.attribute = j.value("attribute", "count");
  if (j.contains("weights")) {
    p.weights = j.at("weights").get<std::vector<double>>();
  }
  if (j.contains("normalizer")) {
    const json& z = j.at("normalizer");
    if (z.is_number()) {
      p.fixed_normalizer = z.get<double>();
    } else if (!(z.is_string() && z.get<std::string>() == "data")) {
      return ConfigError("problem.normalizer",
                         "expected \"data\" or a positive number");
    }
  }
  p.slope = j.value("slope", 1.0);
  p.intercept = j.value("intercept", 0.0);
  if (p.type == ProblemType::kDecision) {
    if (!j.contains("predicate")) {
      return ConfigError("problem", "decision problems need a 'predicate'");
    }
    const json& pj = j.at("predicate");
    if (pj.is_string()) {
      if (pj.get<std::string>() != "language_assistance") {
        return ConfigError("problem.predicate",
                           absl::StrCat("unknown named rule '",
                                        pj.get<std::string>(), "'"));
      }
      p.predicate = LanguageAssistanceRule();
    } else {
      auto pred = Predicate::FromJson(pj);
      if (!pred.ok()) return ConfigError("problem.predicate",
                                         pred.status().message());
      p.predicate = *pred;
    }
  }
  return p;
}

absl::StatusOr<MitigationSpec> ParseMitigation(const json& j) {
  if (auto s = CheckKeys(j, "mitigation",
                         {"strategy", "lower_bound", "level",
                          "temperature_grid", "groups", "method"});
      !s.ok()) {
    return s;
  }
  MitigationSpec m;
  const std::string strategy = j.at("strategy").get<std::string>();
  if (strategy == "linear_proxy") {
    m.strategy = MitigationStrategy::kLinearProxy;
  } else if (strategy == "output_perturbation") {
    m.strategy = MitigationStrategy::kOutputPerturbation;
  } else if (strategy == "temperature") {
    m.strategy = MitigationStrategy::kTemperature;
  } else if (strategy == "piecewise_proxy") {
    m.strategy = MitigationStrategy::kPiecewiseProxy;
  } else {
    return ConfigError("mitigation.strategy",
                       absl::StrCat("unknown strategy '", strategy, "'"));
  }
  if (j.contains("lower_bound")) {
    m.lower_bound = j.at("lower_bound").get<double>();
  }
  m.level = j.value("level", 0.0);
  m.temperature_grid =
      j.value("temperature_grid", std::vector<double>{});
  for (double t : m.temperature_grid) {
    if (!(t >= 0)) {
      return ConfigError("mitigation.temperature_grid",
                         "temperatures must be nonnegative");
    }
  }
  m.groups = j.value("groups", 9);
  if (m.groups < 1) return ConfigError("mitigation.groups", "must be >= 1");
  const std::string method = j.value("method", "least_squares");
  if (method == "least_squares") {
    m.method = FitMethod::kLeastSquares;
  } else if (method == "hinge") {
    m.method = FitMethod::kHinge;
  } else {
    return ConfigError("mitigation.method",
                       absl::StrCat("unknown fit method '", method, "'"));
  }
  return m;
}

absl::StatusOr<ExperimentConfig> ParseConfigImpl(const json& j) {
  if (auto s = CheckKeys(j, "config",
                         {"name", "dataset", "problem", "privacy", "pipeline",
                          "project_outputs_to", "estimator", "mode",
                          "true_positives_only", "budget", "mitigation",
                          "outputs"});
      !s.ok()) {
    return s;
  }
  ExperimentConfig c;
  c.name = j.value("name", "experiment");
  if (c.name.empty() ||
      c.name.find_first_of("/\\") != std::string::npos) {
    return ConfigError("name", "must be a nonempty file-name stem");
  }
  if (!j.contains("dataset")) return ConfigError("config", "missing 'dataset'");
  auto source = ParseSource(j.at("dataset"));
  if (!source.ok()) return source.status();
  c.source = *source;
  auto problem = ParseProblem(j.value("problem", json::object()));
  if (!problem.ok()) return problem.status();
  c.problem = *problem;

  const json privacy = j.value("privacy", json::object());
  if (auto s = CheckKeys(privacy, "privacy", {"epsilons", "sensitivity"});
      !s.ok()) {
    return s;
  }
  c.epsilons = privacy.value("epsilons", std::vector<double>{});
  c.sensitivity = privacy.value("sensitivity", 1.0);
  for (double e : c.epsilons) {
    if (!(e > 0) || !std::isfinite(e)) {
      return ConfigError("privacy.epsilons",
                         absl::StrCat("epsilon must be positive, got ", e));
    }
  }
  if (!(c.sensitivity > 0) || !std::isfinite(c.sensitivity)) {
    return ConfigError("privacy.sensitivity", "must be positive");
  }

  auto pipeline = PipelineFromJson(j.value("pipeline", json::array()));
  if (!pipeline.ok()) {
    return ConfigError("pipeline", pipeline.status().message());
  }
  c.pipeline = *pipeline;
  if (j.contains("project_outputs_to")) {
    c.project_outputs_to = j.at("project_outputs_to").get<double>();
  }

  const json est = j.value("estimator", json::object());
  if (auto s = CheckKeys(est, "estimator",
                         {"samples", "master_seed", "shard_count", "sampling"});
      !s.ok()) {
    return s;
  }
  c.estimator.samples = est.value("samples", int64_t{10000});
  c.estimator.master_seed = est.value("master_seed", uint64_t{0});
  c.estimator.shard_count = est.value("shard_count", 1);
  const std::string sampling = est.value("sampling", "independent");
  if (sampling == "independent") {
    c.estimator.sampling = Sampling::kIndependent;
  } else if (sampling == "antithetic") {
    c.estimator.sampling = Sampling::kAntithetic;
  } else {
    return ConfigError("estimator.sampling",
                       absl::StrCat("unknown sampling '", sampling, "'"));
  }
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "signed") {
      c.mode = BiasMode::kSigned;
    } else if (mode == "absolute") {
      c.mode = BiasMode::kAbsolute;
    } else {
      return ConfigError("mode", absl::StrCat("unknown mode '", mode, "'"));
    }
  }
  c.true_positives_only = j.value("true_positives_only", false);
  c.budget = j.value("budget", 1e6);
  if (!(c.budget > 0)) return ConfigError("budget", "must be positive");
  if (j.contains("mitigation")) {
    auto m = ParseMitigation(j.at("mitigation"));
    if (!m.ok()) return m.status();
    c.mitigation = *m;
  }
  const json outputs = j.value("outputs", json::object());
  if (auto s = CheckKeys(outputs, "outputs", {"dir"}); !s.ok()) return s;
  c.out_dir = outputs.value("dir", ".");
  return c;
}

absl::Status ValidateConfig(const ExperimentConfig& c) {
  if (c.epsilons.empty()) {
    return ConfigError("privacy.epsilons", "list must be nonempty");
  }
  if (auto s = ValidateEstimatorOptions(c.estimator); !s.ok()) {
    return ConfigError("estimator", s.message());
  }
  if (c.mitigation) {
    const auto strategy = c.mitigation->strategy;
    const bool wants_decision =
        strategy == MitigationStrategy::kPiecewiseProxy;
    const bool is_decision = c.problem.type == ProblemType::kDecision;
    const bool is_allotment = c.problem.type == ProblemType::kAllotment;
    if (wants_decision && !is_decision) {
      return ConfigError("mitigation", "piecewise_proxy needs a decision problem");
    }
    if (!wants_decision && strategy != MitigationStrategy::kTemperature &&
        !is_allotment) {
      return ConfigError("mitigation",
                         absl::StrCat(StrategyName(strategy),
                                      " needs an allotment problem"));
    }
  }
  return absl::OkStatus();
}

json SourceToJson(const DataSource& source) {
  if (const auto* syn = std::get_if<SyntheticSource>(&source)) {
    return {{"synthetic", syn->spec}};
  }
  const auto& csv = std::get<CsvSource>(source);
  json j = {{"csv", csv.path},
            {"schema", csv.schema},
            {"filter_minority", csv.ingest.require_minority_population}};
  if (csv.ingest.min_count) j["filter_min_count"] = *csv.ingest.min_count;
  return j;
}

absl::StatusOr<Problem> BuildProblem(const ExperimentConfig& config,
                                     const ExperimentData& d) {
  const ProblemSpec& p = config.problem;
  switch (p.type) {
    case ProblemType::kAllotment: {
      auto attr = d.data.AttributeIndex(p.attribute);
      if (!attr.ok()) return attr.status();
      Normalizer z = DataDependent{};
      if (p.fixed_normalizer) z = FixedConstant{*p.fixed_normalizer};
      auto problem = AllotmentProblem::Create(d.weights, z);
      if (!problem.ok()) return problem.status();
      return AllotmentTask{*problem, *attr};
    }
    case ProblemType::kDecision:
      return DecisionTask{*p.predicate};
    case ProblemType::kAffine: {
      auto attr = d.data.AttributeIndex(p.attribute);
      if (!attr.ok()) return attr.status();
      return AffineProblem{*attr, p.slope, p.intercept};
    }
  }
  return absl::InternalError("unhandled problem type");
}

struct Writer {
  std::filesystem::path dir;
  std::string stem;
  std::vector<std::string> files;

  absl::Status Write(const std::string& suffix, std::string_view content) {
    const auto path = dir / absl::StrCat(stem, "_", suffix);
    if (auto s = WriteTextFile(path.string(), content); !s.ok()) return s;
    files.push_back(path.string());
    return absl::OkStatus();
  }

  absl::Status WriteReport(const std::string& tag, double eps,
                           const FairnessReport& report) {
    const std::string base = absl::StrCat(tag, "eps", FormatDouble(eps));
    if (auto s = Write(base + ".json", ReportToJson(report).dump(2) + "\n");
        !s.ok()) {
      return s;
    }
    return Write(base + ".csv", ReportToCsv(report));
  }
};

EstimatorOptions StreamFor(const EstimatorOptions& base, size_t eps_index,
                           StreamSlot slot) {
  EstimatorOptions e = base;
  e.stream_id = eps_index * kStreamsPerEps + slot;
  return e;
}

absl::Status RunLinearProxy(const ExperimentConfig& c, const ExperimentData& d,
                            size_t attr, size_t k, double eps, Writer& w,
                            std::vector<AlphaRow>& rows, json& extra) {
  const double z = WeightedTotal(d.weights, d.data, attr);
  const double a_max = *std::max_element(d.weights.begin(), d.weights.end());
  RngStream zrng(c.estimator.master_seed, k * kStreamsPerEps + kNormalizerRelease);
  const double z_noisy = z + DrawLaplace(a_max / (eps / 2), zrng);
  auto cond = AuditLinearProxy(d.data, attr, d.weights, eps, z_noisy,
                               StreamFor(c.estimator, k, kMitigationAudit));
  if (!cond.ok()) return cond.status();
  auto marg = AuditLinearProxy(d.data, attr, d.weights, eps, std::nullopt,
                               StreamFor(c.estimator, k, kMarginalAudit));
  if (!marg.ok()) return marg.status();
  if (auto s = w.WriteReport("linear_proxy_conditional_", eps, *cond); !s.ok())
    return s;
  if (auto s = w.WriteReport("linear_proxy_marginal_", eps, *marg); !s.ok())
    return s;
  rows.push_back(SummarizeReport("linear_proxy_conditional", *cond));
  rows.push_back(SummarizeReport("linear_proxy_marginal", *marg));
  auto cost = CostOfPrivacy(*marg, c.budget);
  if (!cost.ok()) return cost.status();
  extra["linear_proxy_cost_of_privacy"] = cost->total;
  extra["noisy_normalizer"] = z_noisy;
  return w.Write(absl::StrCat("linear_proxy_cost_eps", FormatDouble(eps), ".csv"),
                 CostOfPrivacyToCsv(*cost));
}

absl::Status RunTemperature(const ExperimentConfig& c, const ExperimentData& d,
                            const Problem& problem, size_t k, double eps,
                            Writer& w, std::vector<AlphaRow>& rows,
                            json& extra) {
  const MitigationSpec& m = *c.mitigation;
  auto attr = d.data.AttributeIndex(c.problem.attribute);
  if (!attr.ok()) return attr.status();
  auto spec = PrivacySpec::Create(eps, c.sensitivity);
  if (!spec.ok()) return spec.status();
  std::vector<double> domain = d.data.Column(*attr);
  std::sort(domain.begin(), domain.end());
  domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
  const std::vector<double> grid = m.temperature_grid.empty()
                                       ? DefaultTemperatureGrid(spec->scale())
                                       : m.temperature_grid;
  RngStream trng(c.estimator.master_seed,
                 k * kStreamsPerEps + kTemperatureTuning);
  auto tuning = TuneTemperature(domain, m.level, *spec, grid,
                                c.estimator.samples, trng);
  if (!tuning.ok()) return tuning.status();
  std::string csv = "temperature,score\n";
  for (size_t g = 0; g < tuning->grid.size(); ++g) {
    absl::StrAppend(&csv, FormatDouble(tuning->grid[g]), ",",
                    FormatDouble(tuning->scores[g]), "\n");
  }
  if (auto s = w.Write(absl::StrCat("temperature_tuning_eps", FormatDouble(eps),
                                    ".csv"),
                       csv);
      !s.ok()) {
    return s;
  }
  extra["best_temperature"] = tuning->best_temperature;
  extra["best_score"] = tuning->best_score;
  extra["baseline_score"] = tuning->baseline_score;
  extra["tuning_is_private"] = !tuning->non_private;

  Pipeline pipeline;
  bool replaced = false;
  for (const auto& step : c.pipeline) {
    if (const auto* clip = std::get_if<ClipLower>(&step)) {
      pipeline.push_back(TemperatureClip{clip->level, tuning->best_temperature});
      replaced = true;
    } else {
      pipeline.push_back(step);
    }
  }
  if (!replaced) {
    pipeline.insert(pipeline.begin(),
                    TemperatureClip{m.level, tuning->best_temperature});
  }
  AuditOptions opts;
  opts.estimator = StreamFor(c.estimator, k, kMitigationAudit);
  opts.pipeline = pipeline;
  opts.project_outputs_to = c.project_outputs_to;
  opts.mode = c.mode;
  std::vector<double> sens(d.data.num_attributes(), c.sensitivity);
  auto report = EmpiricalBias(problem, d.data, eps, sens, opts);
  if (!report.ok()) return report.status();
  rows.push_back(SummarizeReport("temperature", *report));
  return w.WriteReport("temperature_", eps, *report);
}

absl::Status RunPiecewise(const ExperimentConfig& c, const ExperimentData& d,
                          const FairnessReport& original, size_t k, double eps,
                          Writer& w, std::vector<AlphaRow>& rows,
                          json& extra) {
  const MitigationSpec& m = *c.mitigation;
  auto spec = PrivacySpec::Create(eps, c.sensitivity);
  if (!spec.ok()) return spec.status();
  RngStream rrng(c.estimator.master_seed, k * kStreamsPerEps + kProxyRelease);
  auto released = Release(d.data, *spec, rrng);
  if (!released.ok()) return released.status();
  PiecewiseFitOptions fit;
  fit.method = m.method;
  auto g_attr = released->AttributeIndex(fit.grouping_attribute);
  if (!g_attr.ok()) return g_attr.status();
  const std::vector<double> grouping = released->Column(*g_attr);
  auto breakpoints = PartitionGroups(grouping, m.groups);
  if (!breakpoints.ok()) return breakpoints.status();

  const size_t n = d.data.num_entities();
  std::vector<int> labels(n);
  for (size_t i = 0; i < n; ++i) {
    auto dec = EvalPredicate(*c.problem.predicate, d.data, i);
    if (!dec.ok()) return dec.status();
    labels[i] = dec->value ? 1 : 0;
  }
  auto proxy = FitPiecewiseProxy(*released, labels, *breakpoints, fit);
  if (!proxy.ok()) return proxy.status();
  auto audit = AuditPiecewiseProxy(*proxy, d.data, *spec,
                                   StreamFor(c.estimator, k, kMitigationAudit));
  if (!audit.ok()) return audit.status();
  if (auto s = w.Write(absl::StrCat("proxy_eps", FormatDouble(eps), ".json"),
                       ProxyToJson(*proxy).dump(2) + "\n");
      !s.ok()) {
    return s;
  }
  if (auto s = w.WriteReport("piecewise_proxy_", eps, *audit); !s.ok()) return s;
  rows.push_back(SummarizeReport("piecewise_proxy", *audit));

  // Groups are frozen by the released grouping attribute.
  const size_t num_groups = breakpoints->size() + 1;
  std::unordered_map<std::string, size_t> group_by_id;
  std::vector<std::vector<double>> true_grouping(num_groups);
  for (size_t i = 0; i < n; ++i) {
    const size_t g = GroupOf(*breakpoints, grouping[i]);
    group_by_id[d.data.entity_ids()[i]] = g;
    true_grouping[g].push_back(d.data.at(i, *g_attr));
  }
  auto groups_of = [&](const FairnessReport& r) {
    std::vector<size_t> out;
    for (const auto& e : r.per_entity) out.push_back(group_by_id[e.entity_id]);
    return out;
  };
  const auto alpha_orig =
      GroupAlphas(original, groups_of(original), num_groups);
  const auto alpha_proxy = GroupAlphas(*audit, groups_of(*audit), num_groups);
  std::string csv = "group,size,median_grouping_value,alpha_original,alpha_proxy,"
                    "train_accuracy\n";
  int improved = 0;
  for (size_t g = 0; g < num_groups; ++g) {
    auto& v = true_grouping[g];
    double median = 0;
    if (!v.empty()) {
      std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
      median = v[v.size() / 2];
    }
    improved += alpha_proxy[g] < alpha_orig[g];
    absl::StrAppend(&csv, g, ",", v.size(), ",", FormatDouble(median), ",",
                    FormatDouble(alpha_orig[g]), ",",
                    FormatDouble(alpha_proxy[g]), ",",
                    FormatDouble(proxy->pieces[g].train_accuracy), "\n");
  }
  extra["groups"] = num_groups;
  extra["groups_improved"] = improved;
  return w.Write(absl::StrCat("groups_eps", FormatDouble(eps), ".csv"), csv);
}

absl::StatusOr<ExperimentConfig> ParseUnvalidated(const json& j) {
  try {
    return ParseConfigImpl(j);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed config: ", e.what()));
  }
}

}  // namespace

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const json& j) {
  auto c = ParseUnvalidated(j);
  if (!c.ok()) return c.status();
  if (auto s = ValidateConfig(*c); !s.ok()) return s;
  return c;
}

json ExperimentConfigToJson(const ExperimentConfig& c) {
  json problem = {{"attribute", c.problem.attribute}};
  switch (c.problem.type) {
    case ProblemType::kAllotment:
      problem["type"] = "allotment";
      if (c.problem.weights) problem["weights"] = *c.problem.weights;
      if (c.problem.fixed_normalizer) {
        problem["normalizer"] = *c.problem.fixed_normalizer;
      }
      break;
    case ProblemType::kDecision:
      problem["type"] = "decision";
      problem["predicate"] = c.problem.predicate->ToJson();
      break;
    case ProblemType::kAffine:
      problem["type"] = "affine";
      problem["slope"] = c.problem.slope;
      problem["intercept"] = c.problem.intercept;
      break;
  }
  json j = {
      {"name", c.name},
      {"dataset", SourceToJson(c.source)},
      {"problem", problem},
      {"privacy", {{"epsilons", c.epsilons}, {"sensitivity", c.sensitivity}}},
      {"pipeline", PipelineToJson(c.pipeline)},
      {"estimator",
       {{"samples", c.estimator.samples},
        {"master_seed", c.estimator.master_seed},
        {"shard_count", c.estimator.shard_count},
        {"sampling", SamplingName(c.estimator.sampling)}}},
      {"true_positives_only", c.true_positives_only},
      {"budget", c.budget},
      {"outputs", {{"dir", c.out_dir}}}};
  if (c.project_outputs_to) j["project_outputs_to"] = *c.project_outputs_to;
  if (c.mode) j["mode"] = BiasModeName(*c.mode);
  if (c.mitigation) {
    const auto& m = *c.mitigation;
    json mj = {{"strategy", StrategyName(m.strategy)},
               {"level", m.level},
               {"groups", m.groups},
               {"method", FitMethodName(m.method)}};
    if (m.lower_bound) mj["lower_bound"] = *m.lower_bound;
    if (!m.temperature_grid.empty()) mj["temperature_grid"] = m.temperature_grid;
    j["mitigation"] = mj;
  }
  return j;
}

absl::StatusOr<ExperimentData> LoadExperimentData(
    const ExperimentConfig& config) {
  if (const auto* syn = std::get_if<SyntheticSource>(&config.source)) {
    auto data = GenerateFromJson(syn->spec);
    if (!data.ok()) return data.status();
    std::vector<double> weights(data->num_entities(), 1.0);
    if (config.problem.weights) weights = *config.problem.weights;
    return ExperimentData{std::move(*data), std::move(weights), {}};
  }
  const auto& csv = std::get<CsvSource>(config.source);
  auto loaded = csv.schema == "minority"
                    ? LoadMinorityCsv(csv.path, csv.ingest)
                    : LoadAllotmentCsv(csv.path, csv.ingest);
  if (!loaded.ok()) return loaded.status();
  std::vector<double> weights = loaded->weights;
  if (weights.empty()) weights.assign(loaded->data.num_entities(), 1.0);
  if (config.problem.weights) weights = *config.problem.weights;
  return ExperimentData{std::move(loaded->data), std::move(weights),
                        std::move(loaded->warnings)};
}

absl::Status ValidateAgainstData(const ExperimentConfig& config,
                                 const ExperimentData& d) {
  const ProblemSpec& p = config.problem;
  if (p.type == ProblemType::kDecision) {
    if (auto s = p.predicate->Validate(d.data.attributes()); !s.ok()) {
      return ConfigError("problem.predicate", s.message());
    }
  } else if (!d.data.AttributeIndex(p.attribute).ok()) {
    return ConfigError("problem.attribute",
                       absl::StrCat("dataset has no attribute '", p.attribute,
                                    "'"));
  }
  if (d.weights.size() != d.data.num_entities()) {
    return ConfigError("problem.weights",
                       absl::StrCat("expected ", d.data.num_entities(),
                                    " weights, got ", d.weights.size()));
  }
  if (config.mitigation &&
      config.mitigation->strategy == MitigationStrategy::kPiecewiseProxy) {
    PiecewiseFitOptions fit;
    for (const auto& name : fit.features) {
      if (!d.data.AttributeIndex(name).ok()) {
        return ConfigError("mitigation",
                           absl::StrCat("dataset has no attribute '", name,
                                        "'"));
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config,
                                               const ExperimentData& d) {
  auto problem = BuildProblem(config, d);
  if (!problem.ok()) return problem.status();
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", config.out_dir, ": ", ec.message()));
  }
  Writer w{config.out_dir, config.name, {}};
  ExperimentResult result;
  const json config_json = ExperimentConfigToJson(config);
  json per_eps = json::array();
  const std::vector<double> sens(d.data.num_attributes(), config.sensitivity);

  for (size_t k = 0; k < config.epsilons.size(); ++k) {
    const double eps = config.epsilons[k];
    json extra = {{"epsilon", eps}};
    AuditOptions opts;
    opts.estimator = StreamFor(config.estimator, k, kBaseAudit);
    opts.pipeline = config.pipeline;
    opts.project_outputs_to = config.project_outputs_to;
    opts.mode = config.mode;
    opts.true_positives_only = config.true_positives_only;
    auto report = EmpiricalBias(*problem, d.data, eps, sens, opts);
    if (!report.ok()) return report.status();
    report->metadata["experiment"] = config_json;
    if (auto s = w.WriteReport("", eps, *report); !s.ok()) return s;
    result.alpha_table.push_back(SummarizeReport("baseline", *report));

    if (report->mode == BiasMode::kSigned &&
        config.problem.type == ProblemType::kAllotment) {
      auto cost = CostOfPrivacy(*report, config.budget);
      if (!cost.ok()) return cost.status();
      extra["cost_of_privacy"] = cost->total;
      if (auto s = w.Write(absl::StrCat("cost_eps", FormatDouble(eps), ".csv"),
                           CostOfPrivacyToCsv(*cost));
          !s.ok()) {
        return s;
      }
    }

    if (config.mitigation) {
      const size_t attr =
          config.problem.type == ProblemType::kAllotment
              ? std::get<AllotmentTask>(*problem).attribute
              : 0;
      absl::Status s;
      switch (config.mitigation->strategy) {
        case MitigationStrategy::kLinearProxy:
          s = RunLinearProxy(config, d, attr, k, eps, w, result.alpha_table,
                             extra);
          break;
        case MitigationStrategy::kOutputPerturbation: {
          auto r = AuditOutputPerturbation(
              d.data, attr, d.weights, eps, config.mitigation->lower_bound,
              StreamFor(config.estimator, k, kMitigationAudit));
          if (!r.ok()) return r.status();
          result.alpha_table.push_back(
              SummarizeReport("output_perturbation", *r));
          s = w.WriteReport("output_perturbation_", eps, *r);
          break;
        }
        case MitigationStrategy::kTemperature:
          s = RunTemperature(config, d, *problem, k, eps, w,
                             result.alpha_table, extra);
          break;
        case MitigationStrategy::kPiecewiseProxy:
          s = RunPiecewise(config, d, *report, k, eps, w, result.alpha_table,
                           extra);
          break;
      }
      if (!s.ok()) return s;
    }
    per_eps.push_back(extra);
  }
  if (auto s = w.Write("alpha.csv", AlphaTableToCsv(result.alpha_table));
      !s.ok()) {
    return s;
  }
  result.files = w.files;
  json alpha = json::array();
  for (const auto& r : result.alpha_table) {
    alpha.push_back({{"label", r.label},
                     {"epsilon", r.epsilon},
                     {"alpha", r.alpha},
                     {"pooled_std_error", r.pooled_std_error}});
  }
  result.summary = {{"version", Version()},
                    {"name", config.name},
                    {"files", result.files},
                    {"alpha", alpha},
                    {"per_epsilon", per_eps},
                    {"warnings", d.warnings}};
  return result;
}

void ApplyOverrides(const ExperimentOverrides& o, ExperimentConfig& c) {
  if (o.seed) c.estimator.master_seed = *o.seed;
  if (o.samples) c.estimator.samples = *o.samples;
  if (o.shards) c.estimator.shard_count = *o.shards;
  if (!o.epsilons.empty()) c.epsilons = o.epsilons;
  if (o.out_dir) c.out_dir = *o.out_dir;
}

json ErrorJson(int exit_code, const absl::Status& status) {
  const char* kind = exit_code == kExitConfigError ? "config"
                     : exit_code == kExitDataError ? "data"
                                                   : "numeric";
  return {{"error",
           {{"exit_code", exit_code},
            {"kind", kind},
            {"status", absl::StatusCodeToString(status.code())},
            {"message", std::string(status.message())}}}};
}

ExperimentOutcome RunExperimentJson(const json& config_json,
                                    const ExperimentOverrides& overrides) {
  auto fail = [](int code, const absl::Status& s) {
    return ExperimentOutcome{code, s, ErrorJson(code, s)};
  };
  auto config = ParseUnvalidated(config_json);
  if (!config.ok()) return fail(kExitConfigError, config.status());
  ApplyOverrides(overrides, *config);
  if (auto s = ValidateConfig(*config); !s.ok()) {
    return fail(kExitConfigError, s);
  }
  auto data = LoadExperimentData(*config);
  if (!data.ok()) {
    // A bad generator spec is a config problem; anything else is the data.
    const bool generator =
        std::holds_alternative<SyntheticSource>(config->source);
    return fail(generator ? kExitConfigError : kExitDataError, data.status());
  }
  if (auto s = ValidateAgainstData(*config, *data); !s.ok()) {
    return fail(kExitConfigError, s);
  }
  auto result = RunExperiment(*config, *data);
  if (!result.ok()) return fail(kExitNumericError, result.status());
  return ExperimentOutcome{kExitOk, absl::OkStatus(), result->summary};
}

}  // namespace dpfair
