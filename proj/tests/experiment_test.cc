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

#include <filesystem>
#include <string>

#include "gtest/gtest.h"

namespace dpfair {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dpfair_exp_" + name);
  fs::remove_all(dir);
  return dir;
}

json Allotment(const fs::path& out) {
  json j = json::parse(R"({
    "name": "pf",
    "dataset": {"synthetic": {"generator": "power_law", "n": 30, "seed": 4}},
    "problem": {"type": "allotment", "attribute": "count"},
    "privacy": {"epsilons": [0.5, 0.1]},
    "pipeline": [{"clip_lower": 0}, "stochastic_round"],
    "estimator": {"samples": 400, "master_seed": 7, "shard_count": 2}
  })");
  j["outputs"] = {{"dir", out.string()}};
  return j;
}

TEST(ConfigTest, ParsesAndRoundTrips) {
  auto c = ParseExperimentConfig(Allotment("/tmp/x"));
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->name, "pf");
  EXPECT_EQ(c->epsilons, (std::vector<double>{0.5, 0.1}));
  EXPECT_EQ(c->pipeline.size(), 2u);
  EXPECT_EQ(c->estimator.shard_count, 2);
  auto again = ParseExperimentConfig(ExperimentConfigToJson(*c));
  ASSERT_TRUE(again.ok()) << again.status();
  EXPECT_EQ(ExperimentConfigToJson(*again), ExperimentConfigToJson(*c));
}

TEST(ConfigTest, RejectsUnknownAndMalformedFields) {
  json j = Allotment("/tmp/x");
  j["surprise"] = 1;
  auto c = ParseExperimentConfig(j);
  ASSERT_FALSE(c.ok());
  EXPECT_NE(c.status().message().find("surprise"), std::string::npos);

  j = Allotment("/tmp/x");
  j["pipeline"] = json::array({"round_up"});
  c = ParseExperimentConfig(j);
  ASSERT_FALSE(c.ok());
  EXPECT_NE(c.status().message().find("round_up"), std::string::npos);

  j = Allotment("/tmp/x");
  j["privacy"]["epsilons"] = "many";
  EXPECT_EQ(ParseExperimentConfig(j).status().code(),
            absl::StatusCode::kInvalidArgument);

  j = Allotment("/tmp/x");
  j["privacy"]["epsilons"] = json::array();
  EXPECT_FALSE(ParseExperimentConfig(j).ok());

  j = Allotment("/tmp/x");
  j["mitigation"] = {{"strategy", "piecewise_proxy"}};
  EXPECT_FALSE(ParseExperimentConfig(j).ok());

  j = Allotment("/tmp/x");
  j["estimator"]["sampling"] = "antithetic";
  j["estimator"]["samples"] = 401;
  EXPECT_FALSE(ParseExperimentConfig(j).ok());
}

TEST(ExperimentTest, WritesReportsAndSummary) {
  const fs::path out = TempDir("basic");
  auto outcome = RunExperimentJson(Allotment(out), {});
  ASSERT_EQ(outcome.exit_code, kExitOk) << outcome.output.dump();
  for (const char* f : {"pf_eps0.5.json", "pf_eps0.5.csv", "pf_eps0.1.csv",
                        "pf_cost_eps0.1.csv", "pf_alpha.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_EQ(outcome.output["alpha"].size(), 2u);
  EXPECT_EQ(outcome.output["per_epsilon"][1]["epsilon"], 0.1);
  fs::remove_all(out);
}

TEST(ExperimentTest, OverridesApplyBeforeValidation) {
  const fs::path out = TempDir("override");
  json j = Allotment("/unused");
  j["privacy"]["epsilons"] = json::array();
  ExperimentOverrides o;
  o.epsilons = {2};
  o.out_dir = out.string();
  o.samples = 100;
  auto outcome = RunExperimentJson(j, o);
  ASSERT_EQ(outcome.exit_code, kExitOk) << outcome.output.dump();
  EXPECT_TRUE(fs::exists(out / "pf_eps2.csv"));
  fs::remove_all(out);
}

TEST(ExperimentTest, ExitCodes) {
  json j = Allotment("/tmp/dpfair_unused");
  j["estimator"]["samples"] = 1;
  auto o = RunExperimentJson(j, {});
  EXPECT_EQ(o.exit_code, kExitConfigError);
  EXPECT_EQ(o.output["error"]["kind"], "config");

  j = Allotment("/tmp/dpfair_unused");
  j["dataset"] = {{"csv", "/nonexistent/data.csv"}};
  o = RunExperimentJson(j, {});
  EXPECT_EQ(o.exit_code, kExitDataError);
  EXPECT_EQ(o.output["error"]["kind"], "data");

  j = Allotment("/tmp/dpfair_unused");
  j["problem"]["attribute"] = "votes";
  EXPECT_EQ(RunExperimentJson(j, {}).exit_code, kExitConfigError);

  // Unclipped P^F at tiny epsilon hits a negative normalizer.
  j = Allotment((TempDir("numeric")).string());
  j["pipeline"] = json::array();
  j["privacy"]["epsilons"] = {1e-4};
  o = RunExperimentJson(j, {});
  EXPECT_EQ(o.exit_code, kExitNumericError);
  EXPECT_EQ(o.output["error"]["status"], "FAILED_PRECONDITION");
}

TEST(ExperimentTest, ReportsAreIdenticalAcrossShards) {
  std::string first;
  for (int shards : {1, 2, 4}) {
    const fs::path out = TempDir("shards" + std::to_string(shards));
    ExperimentOverrides o;
    o.shards = shards;
    auto outcome = RunExperimentJson(Allotment(out), o);
    ASSERT_EQ(outcome.exit_code, kExitOk);
    auto csv = ReadTextFile((out / "pf_eps0.1.csv").string());
    ASSERT_TRUE(csv.ok());
    if (first.empty()) {
      first = *csv;
    } else {
      EXPECT_EQ(*csv, first) << shards;
    }
    fs::remove_all(out);
  }
}

TEST(ExperimentTest, MitigationStrategiesRun) {
  const fs::path out = TempDir("mitigate");
  const std::pair<const char*, const char*> cases[] = {
      {"linear_proxy", "pf_linear_proxy_conditional_eps0.1.csv"},
      {"output_perturbation", "pf_output_perturbation_eps0.1.csv"},
      {"temperature", "pf_temperature_tuning_eps0.1.csv"},
  };
  for (const auto& [strategy, file] : cases) {
    json j = Allotment(out);
    j["mitigation"] = {{"strategy", strategy}};
    j["mitigation"]["temperature_grid"] = {0.5, 5, 50};
    auto outcome = RunExperimentJson(j, {});
    ASSERT_EQ(outcome.exit_code, kExitOk)
        << strategy << " " << outcome.output.dump();
    EXPECT_TRUE(fs::exists(out / file)) << file;
  }
  json d = json::parse(R"({
    "name": "pm",
    "dataset": {"synthetic": {"generator": "minority_counties", "n": 60,
                              "seed": 2}},
    "problem": {"type": "decision", "predicate": "language_assistance"},
    "privacy": {"epsilons": [1]},
    "estimator": {"samples": 200},
    "mitigation": {"strategy": "piecewise_proxy", "groups": 3}
  })");
  d["outputs"] = {{"dir", out.string()}};
  auto outcome = RunExperimentJson(d, {});
  ASSERT_EQ(outcome.exit_code, kExitOk) << outcome.output.dump();
  EXPECT_TRUE(fs::exists(out / "pm_proxy_eps1.json"));
  EXPECT_TRUE(fs::exists(out / "pm_groups_eps1.csv"));
  fs::remove_all(out);
}

}  // namespace
}  // namespace dpfair
