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

// Command line front end for the dpfair toolkit.
//
//   dpfair run --config experiment.json --out-dir out/
//   dpfair audit --synth '{"generator":"power_law","n":50}' --epsilon 0.1
//   dpfair compose-bound --op and --alpha1 0.1 --alpha2 0.2 --bmin1 0 --bmin2 0
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpfair/experiment.h"
#include "dpfair/fairness.h"
#include "dpfair/ingest.h"
#include "dpfair/mechanisms.h"
#include "dpfair/mitigation.h"
#include "dpfair/postprocess.h"
#include "dpfair/report_io.h"
#include "dpfair/rng.h"
#include "dpfair/synth.h"
#include "nlohmann/json.hpp"

namespace {

using json = nlohmann::json;
using dpfair::kExitConfigError;
using dpfair::kExitDataError;
using dpfair::kExitNumericError;
using dpfair::kExitOk;

struct Globals {
  std::optional<uint64_t> seed;
  std::optional<int64_t> samples;
  std::optional<int> shards;
  std::vector<double> epsilons;
  std::optional<std::string> out_dir;
};

int Fail(int code, const absl::Status& status) {
  std::cerr << dpfair::ErrorJson(code, status).dump() << "\n";
  return code;
}

int Emit(const json& j) {
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

absl::StatusOr<json> ParseJsonArg(const std::string& text,
                                  const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot parse ", what, ": ", e.what()));
  }
}

absl::StatusOr<json> LoadJsonFile(const std::string& path) {
  auto text = dpfair::ReadTextFile(path);
  if (!text.ok()) return text.status();
  return ParseJsonArg(*text, path);
}

dpfair::ExperimentOverrides ToOverrides(const Globals& g) {
  return {g.seed, g.samples, g.shards, g.epsilons, g.out_dir};
}

int RunOutcome(const json& config, const Globals& g) {
  auto outcome = dpfair::RunExperimentJson(config, ToOverrides(g));
  if (outcome.exit_code != kExitOk) {
    std::cerr << outcome.output.dump() << "\n";
    return outcome.exit_code;
  }
  return Emit(outcome.output);
}

// Inline dataset/problem flags shared by `audit` and `mitigate`.
struct InlineSpec {
  std::string config;
  std::string input;
  std::string schema = "allotment";
  std::string synth;
  std::string predicate;
  std::string attribute = "count";
  std::string pipeline = "[]";
  std::string mode;
  std::string name = "audit";
  std::optional<int64_t> min_count;
  bool filter_minority = false;
  bool true_positives_only = false;
  bool antithetic = false;
};

void AddInlineFlags(CLI::App* cmd, InlineSpec& s) {
  cmd->add_option("--config", s.config, "Experiment config JSON file");
  cmd->add_option("--input", s.input, "Input CSV");
  cmd->add_option("--schema", s.schema, "CSV schema: allotment or minority");
  cmd->add_option("--synth", s.synth, "Synthetic generator spec (JSON)");
  cmd->add_option("--predicate", s.predicate,
                  "Decision rule JSON, or 'language_assistance'");
  cmd->add_option("--attribute", s.attribute, "Allotment attribute");
  cmd->add_option("--pipeline", s.pipeline, "Post-processing steps (JSON)");
  cmd->add_option("--mode", s.mode, "signed or absolute");
  cmd->add_option("--name", s.name, "Output file stem");
  cmd->add_option("--filter-min-count", s.min_count,
                  "Drop allotment rows with count below this");
  cmd->add_flag("--filter-minority", s.filter_minority,
                "Drop counties with x_sp < 1");
  cmd->add_flag("--true-positives-only", s.true_positives_only,
                "Decision rules: audit entities whose true decision is True");
  cmd->add_flag("--antithetic", s.antithetic, "Antithetic noise pairs");
}

absl::StatusOr<json> BuildInlineConfig(const InlineSpec& s) {
  if (!s.config.empty()) return LoadJsonFile(s.config);
  json c = {{"name", s.name}};
  if (!s.synth.empty()) {
    auto spec = ParseJsonArg(s.synth, "--synth");
    if (!spec.ok()) return spec.status();
    c["dataset"] = {{"synthetic", *spec}};
  } else if (!s.input.empty()) {
    c["dataset"] = {{"csv", s.input},
                    {"schema", s.schema},
                    {"filter_minority", s.filter_minority}};
    if (s.min_count) c["dataset"]["filter_min_count"] = *s.min_count;
  } else {
    return absl::InvalidArgumentError("give --config, --input or --synth");
  }
  if (!s.predicate.empty()) {
    json pred = s.predicate;
    if (s.predicate != "language_assistance") {
      auto parsed = ParseJsonArg(s.predicate, "--predicate");
      if (!parsed.ok()) return parsed.status();
      pred = *parsed;
    }
    c["problem"] = {{"type", "decision"}, {"predicate", pred}};
  } else {
    c["problem"] = {{"type", "allotment"}, {"attribute", s.attribute}};
  }
  auto pipeline = ParseJsonArg(s.pipeline, "--pipeline");
  if (!pipeline.ok()) return pipeline.status();
  c["pipeline"] = *pipeline;
  if (!s.mode.empty()) c["mode"] = s.mode;
  c["true_positives_only"] = s.true_positives_only;
  if (s.antithetic) c["estimator"] = {{"sampling", "antithetic"}};
  return c;
}

int CmdRelease(const Globals& g, const std::string& input,
               const std::string& schema, const std::string& synth,
               const std::string& pipeline_text, const std::string& output) {
  if (g.epsilons.size() != 1) {
    return Fail(kExitConfigError, absl::InvalidArgumentError(
                                      "release needs exactly one --epsilon"));
  }
  auto pipeline_json = ParseJsonArg(pipeline_text, "--pipeline");
  if (!pipeline_json.ok()) return Fail(kExitConfigError, pipeline_json.status());
  auto pipeline = dpfair::PipelineFromJson(*pipeline_json);
  if (!pipeline.ok()) return Fail(kExitConfigError, pipeline.status());
  absl::StatusOr<dpfair::Dataset> data = absl::InvalidArgumentError(
      "give --input or --synth");
  if (!synth.empty()) {
    auto spec = ParseJsonArg(synth, "--synth");
    if (!spec.ok()) return Fail(kExitConfigError, spec.status());
    data = dpfair::GenerateFromJson(*spec);
    if (!data.ok()) return Fail(kExitConfigError, data.status());
  } else if (!input.empty()) {
    auto loaded = schema == "minority"
                      ? dpfair::LoadMinorityCsv(input, {})
                      : dpfair::LoadAllotmentCsv(input, {});
    if (!loaded.ok()) return Fail(kExitDataError, loaded.status());
    data = std::move(loaded->data);
  } else {
    return Fail(kExitConfigError, data.status());
  }
  auto spec = dpfair::PrivacySpec::Create(g.epsilons[0]);
  if (!spec.ok()) return Fail(kExitConfigError, spec.status());
  dpfair::RngStream rng(g.seed.value_or(0), 0);
  auto released = dpfair::Release(*data, *spec, rng);
  if (!released.ok()) return Fail(kExitNumericError, released.status());
  if (auto s = dpfair::ApplyPipeline(*pipeline, *released, rng); !s.ok()) {
    return Fail(kExitNumericError, s);
  }
  std::string csv = "entity_id";
  for (const auto& a : released->attributes()) absl::StrAppend(&csv, ",", a);
  csv += "\n";
  for (size_t i = 0; i < released->num_entities(); ++i) {
    csv += released->entity_ids()[i];
    for (size_t j = 0; j < released->num_attributes(); ++j) {
      absl::StrAppend(&csv, ",", dpfair::FormatDouble(released->at(i, j)));
    }
    csv += "\n";
  }
  if (output.empty()) {
    std::cout << csv;
    return kExitOk;
  }
  if (auto s = dpfair::WriteTextFile(output, csv); !s.ok()) {
    return Fail(kExitDataError, s);
  }
  return Emit({{"released", output}, {"epsilon", spec->epsilon()}});
}

int CmdComposeBound(const std::string& op_name, double alpha1, double alpha2,
                    double bmin1, double bmin2) {
  dpfair::BoundOp op;
  if (op_name == "and" || op_name == "or") {
    op = dpfair::BoundOp::kAndOr;
  } else if (op_name == "xor") {
    op = dpfair::BoundOp::kXor;
  } else {
    return Fail(kExitConfigError,
                absl::InvalidArgumentError(
                    absl::StrCat("unknown operator '", op_name, "'")));
  }
  auto bound = dpfair::ComposeFairnessBound(op, alpha1, alpha2, bmin1, bmin2);
  if (!bound.ok()) return Fail(kExitNumericError, bound.status());
  json out = {{"op", op_name},
              {"alpha1", alpha1},
              {"alpha2", alpha2},
              {"bmin1", bmin1},
              {"bmin2", bmin2},
              {"bound", *bound}};
  if (op_name != "xor") {
    auto worst = dpfair::WorstTruthAssignment(op_name == "and"
                                                  ? dpfair::BoolOp::kAnd
                                                  : dpfair::BoolOp::kOr);
    if (worst.ok()) {
      out["worst_truth_assignment"] = {worst->first, worst->second};
    }
  }
  return Emit(out);
}

int CmdPostprocess(const Globals& g, double x, double level,
                   const std::vector<double>& project, double target) {
  if (!project.empty()) {
    const auto projected = dpfair::ProjectSumValues(project, target);
    double sum = 0, shift = projected[0] - project[0];
    for (double v : projected) sum += v;
    return Emit({{"projected", projected},
                 {"sum", sum},
                 {"target", target},
                 {"shift", shift}});
  }
  if (g.epsilons.empty()) {
    return Fail(kExitConfigError,
                absl::InvalidArgumentError("give --epsilon or --project"));
  }
  json rows = json::array();
  const int64_t m = g.samples.value_or(1000000);
  for (size_t k = 0; k < g.epsilons.size(); ++k) {
    auto spec = dpfair::PrivacySpec::Create(g.epsilons[k]);
    if (!spec.ok()) return Fail(kExitConfigError, spec.status());
    auto expected = dpfair::ExpectedClipped(x, level, spec->scale());
    if (!expected.ok()) return Fail(kExitNumericError, expected.status());
    dpfair::RngStream rng(g.seed.value_or(0), k);
    dpfair::Moments mom;
    for (int64_t t = 0; t < m; ++t) {
      mom.Add(dpfair::ClipLowerValue(x + dpfair::DrawLaplace(spec->scale(), rng),
                                     level));
    }
    const double z = (mom.mean() - *expected) / mom.std_error();
    rows.push_back({{"epsilon", g.epsilons[k]},
                    {"scale", spec->scale()},
                    {"closed_form", *expected},
                    {"monte_carlo_mean", mom.mean()},
                    {"std_error", mom.std_error()},
                    {"z", z},
                    {"bias", *expected - x}});
  }
  return Emit({{"x", x}, {"level", level}, {"samples", m}, {"checks", rows}});
}

int CmdCostOfPrivacy(const std::string& report_path, double budget,
                     const std::string& output) {
  auto j = LoadJsonFile(report_path);
  if (!j.ok()) return Fail(kExitDataError, j.status());
  auto report = dpfair::ReportFromJson(*j);
  if (!report.ok()) return Fail(kExitDataError, report.status());
  auto cost = dpfair::CostOfPrivacy(*report, budget);
  if (!cost.ok()) return Fail(kExitConfigError, cost.status());
  const std::string csv = dpfair::CostOfPrivacyToCsv(*cost);
  if (!output.empty()) {
    if (auto s = dpfair::WriteTextFile(output, csv); !s.ok()) {
      return Fail(kExitDataError, s);
    }
  }
  size_t negative = 0;
  for (double s : cost->per_entity_shortfall) negative += s > 0;
  return Emit({{"budget", budget},
               {"total", cost->total},
               {"underallocated_entities", negative},
               {"output", output}});
}

int CmdSynth(const std::string& spec_text, const std::string& output) {
  auto spec = ParseJsonArg(spec_text, "--spec");
  if (!spec.ok()) return Fail(kExitConfigError, spec.status());
  auto data = dpfair::GenerateFromJson(*spec);
  if (!data.ok()) return Fail(kExitConfigError, data.status());
  const std::string csv = data->num_attributes() == 3
                              ? dpfair::MinorityToCsv(*data)
                              : dpfair::AllotmentToCsv(*data);
  if (output.empty()) {
    std::cout << csv;
    return kExitOk;
  }
  if (auto s = dpfair::WriteTextFile(output, csv); !s.ok()) {
    return Fail(kExitDataError, s);
  }
  return Emit({{"written", output}, {"entities", data->num_entities()}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness audits of differentially private releases"};
  app.set_version_flag("--version", dpfair::Version());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--samples", g.samples, "Monte Carlo draws m");
  app.add_option("--shards", g.shards, "Worker threads");
  app.add_option("--epsilon", g.epsilons, "Privacy budget (repeatable)")
      ->take_all()
      ->allow_extra_args(false);
  app.add_option("--out-dir", g.out_dir, "Output directory");

  int rc = kExitOk;

  auto* run = app.add_subcommand("run", "Run an experiment config");
  std::string run_config;
  run->add_option("--config", run_config, "Experiment config JSON")
      ->required();
  run->callback([&] {
    auto j = LoadJsonFile(run_config);
    rc = j.ok() ? RunOutcome(*j, g) : Fail(kExitConfigError, j.status());
  });

  auto* release = app.add_subcommand("release", "Release data with Laplace");
  std::string rel_input, rel_schema = "allotment", rel_synth, rel_out;
  std::string rel_pipeline = "[]";
  release->add_option("--input", rel_input, "Input CSV");
  release->add_option("--schema", rel_schema, "allotment or minority");
  release->add_option("--synth", rel_synth, "Synthetic generator spec");
  release->add_option("--pipeline", rel_pipeline, "Post-processing (JSON)");
  release->add_option("--output", rel_out, "Output CSV (default stdout)");
  release->callback([&] {
    rc = CmdRelease(g, rel_input, rel_schema, rel_synth, rel_pipeline, rel_out);
  });

  auto* audit = app.add_subcommand("audit", "Bias and fairness report");
  InlineSpec audit_spec;
  AddInlineFlags(audit, audit_spec);
  audit->callback([&] {
    auto c = BuildInlineConfig(audit_spec);
    rc = c.ok() ? RunOutcome(*c, g) : Fail(kExitConfigError, c.status());
  });

  auto* bound = app.add_subcommand("compose-bound",
                                   "Fairness bound of a composed rule");
  std::string op = "and";
  double alpha1 = 0, alpha2 = 0, bmin1 = 0, bmin2 = 0;
  bound->add_option("--op", op, "and, or or xor")->required();
  bound->add_option("--alpha1", alpha1)->required();
  bound->add_option("--alpha2", alpha2)->required();
  bound->add_option("--bmin1", bmin1, "Minimum |bias| of the first rule");
  bound->add_option("--bmin2", bmin2, "Minimum |bias| of the second rule");
  bound->callback(
      [&] { rc = CmdComposeBound(op, alpha1, alpha2, bmin1, bmin2); });

  auto* post = app.add_subcommand("postprocess-analyze",
                                  "Clipping bias and projection checks");
  double px = 1, plevel = 0, ptarget = 1;
  std::vector<double> project;
  post->add_option("--x", px, "True value");
  post->add_option("--level", plevel, "Clip level");
  post->add_option("--project", project, "Values to project onto sum=target");
  post->add_option("--target", ptarget, "Projection target");
  post->callback([&] { rc = CmdPostprocess(g, px, plevel, project, ptarget); });

  auto* mitigate = app.add_subcommand("mitigate", "Run a mitigation strategy");
  InlineSpec mit_spec;
  mit_spec.name = "mitigate";
  AddInlineFlags(mitigate, mit_spec);
  std::string strategy = "linear_proxy", method = "least_squares";
  int groups = 9;
  double level = 0;
  std::optional<double> lower_bound;
  mitigate->add_option("--strategy", strategy,
                       "linear_proxy, output_perturbation, temperature or "
                       "piecewise_proxy");
  mitigate->add_option("--groups", groups, "Piecewise proxy groups");
  mitigate->add_option("--method", method, "least_squares or hinge");
  mitigate->add_option("--level", level, "Temperature clip level");
  mitigate->add_option("--lower-bound", lower_bound, "Public lower bound on Z");
  mitigate->callback([&] {
    auto c = BuildInlineConfig(mit_spec);
    if (!c.ok()) {
      rc = Fail(kExitConfigError, c.status());
      return;
    }
    if (mit_spec.config.empty() || !c->contains("mitigation")) {
      json m = {{"strategy", strategy},
                {"groups", groups},
                {"method", method},
                {"level", level}};
      if (lower_bound) m["lower_bound"] = *lower_bound;
      (*c)["mitigation"] = m;
    }
    rc = RunOutcome(*c, g);
  });

  auto* cost = app.add_subcommand("cost-of-privacy",
                                  "Budget shortfall from a signed report");
  std::string cost_report, cost_out;
  double budget = 1e6;
  cost->add_option("--report", cost_report, "Report JSON")->required();
  cost->add_option("--budget", budget, "Total budget B");
  cost->add_option("--output", cost_out, "Ranking CSV");
  cost->callback([&] { rc = CmdCostOfPrivacy(cost_report, budget, cost_out); });

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string synth_spec, synth_out;
  synth->add_option("--spec", synth_spec, "Generator spec JSON")->required();
  synth->add_option("--output", synth_out, "Output CSV (default stdout)");
  synth->callback([&] { rc = CmdSynth(synth_spec, synth_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }
  return rc;
}
