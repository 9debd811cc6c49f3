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

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "dpfair/report_io.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult Exec(const std::string& args) {
  const std::string cmd = std::string(DPFAIR_CLI_PATH) + " " + args + " 2>&1";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path Fresh(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dpfair_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(CliTest, Version) {
  const CliResult r = Exec("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(dpfair::Version()), std::string::npos);
}

TEST(CliTest, ComposeBound) {
  const CliResult r = Exec(
      "compose-bound --op and --alpha1 0.05 --alpha2 0.03 --bmin1 0.1 "
      "--bmin2 0.1");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["bound"].get<double>(), 0.2505, 1e-12);
  EXPECT_EQ(j["worst_truth_assignment"], json::array({true, true}));
  EXPECT_EQ(Exec("compose-bound --op nand --alpha1 0 --alpha2 0").code, 2);
  EXPECT_EQ(Exec("compose-bound --op xor --alpha1 0.4 --alpha2 0 --bmin1 0.2")
                .code,
            4);
}

TEST(CliTest, PostprocessAnalyze) {
  CliResult r = Exec("postprocess-analyze --project 0.2 --project 0.3 --target 1");
  ASSERT_EQ(r.code, 0) << r.out;
  json j = json::parse(r.out);
  EXPECT_NEAR(j["projected"][0].get<double>(), 0.45, 1e-12);
  r = Exec("--epsilon 0.1 --samples 200000 postprocess-analyze --x 1 --level 0");
  ASSERT_EQ(r.code, 0) << r.out;
  j = json::parse(r.out);
  EXPECT_LT(std::fabs(j["checks"][0]["z"].get<double>()), 4);
}

TEST(CliTest, SynthReleaseAuditAndCost) {
  const fs::path dir = Fresh("flow");
  const std::string data = (dir / "d.csv").string();
  CliResult r = Exec("synth --spec '{\"generator\":\"power_law\",\"n\":20,\"seed\":1}'"
               " --output " + data);
  ASSERT_EQ(r.code, 0) << r.out;
  r = Exec("--epsilon 1 --seed 3 release --input " + data +
           " --pipeline '[{\"clip_lower\":0},\"stochastic_round\"]'");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.rfind("entity_id,count\n", 0), 0u);
  r = Exec("--epsilon 0.5 --samples 500 --out-dir " + dir.string() +
           " audit --name a --input " + data +
           " --pipeline '[{\"clip_lower\":0}]'");
  ASSERT_EQ(r.code, 0) << r.out;
  ASSERT_TRUE(fs::exists(dir / "a_eps0.5.json"));
  r = Exec("cost-of-privacy --report " + (dir / "a_eps0.5.json").string() +
           " --budget 1000 --output " + (dir / "cost.csv").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "cost.csv"));
  fs::remove_all(dir);
}

TEST(CliTest, RunConfigAndShardInvariance) {
  const fs::path dir = Fresh("run");
  const json cfg = {
      {"name", "c"},
      {"dataset", {{"synthetic", {{"generator", "linear_ramp"}, {"n", 12}}}}},
      {"privacy", {{"epsilons", {0.5}}}},
      {"pipeline", {{{"clip_lower", 0}}}},
      {"estimator", {{"samples", 300}, {"master_seed", 9}}}};
  ASSERT_TRUE(dpfair::WriteTextFile((dir / "c.json").string(), cfg.dump()).ok());
  std::string first;
  for (int shards : {1, 2, 4}) {
    const fs::path out = dir / ("s" + std::to_string(shards));
    const CliResult r = Exec("--shards " + std::to_string(shards) + " --out-dir " +
                       out.string() + " run --config " +
                       (dir / "c.json").string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto csv = dpfair::ReadTextFile((out / "c_eps0.5.csv").string());
    ASSERT_TRUE(csv.ok());
    if (first.empty()) first = *csv;
    EXPECT_EQ(*csv, first);
  }
  fs::remove_all(dir);
}

TEST(CliTest, ErrorExitCodes) {
  const fs::path dir = Fresh("errors");
  CliResult r = Exec("run --config " + (dir / "missing.json").string());
  EXPECT_EQ(r.code, 2) << r.out;
  const json err = json::parse(r.out);
  EXPECT_EQ(err["error"]["exit_code"], 2);

  r = Exec("--epsilon 1 audit --input " + (dir / "nope.csv").string());
  EXPECT_EQ(r.code, 3) << r.out;

  ASSERT_TRUE(
      dpfair::WriteTextFile((dir / "bad.csv").string(),
                            "district_id,count\na,-1\n")
          .ok());
  r = Exec("--epsilon 1 audit --input " + (dir / "bad.csv").string());
  EXPECT_EQ(r.code, 3) << r.out;

  r = Exec("--epsilon 1 audit --synth '{\"generator\":\"linear_ramp\",\"n\":3}'"
           " --pipeline '[\"bogus\"]'");
  EXPECT_EQ(r.code, 2) << r.out;

  r = Exec("--epsilon 0.0001 --samples 200 --out-dir " + dir.string() +
           " audit --synth '{\"generator\":\"linear_ramp\",\"n\":3}'");
  EXPECT_EQ(r.code, 4) << r.out;

  EXPECT_EQ(Exec("no-such-command").code, 2);
  fs::remove_all(dir);
}

TEST(CliTest, MitigateStrategies) {
  const fs::path dir = Fresh("mitigate");
  const CliResult r = Exec(
      "--epsilon 0.1 --samples 400 --out-dir " + dir.string() +
      " mitigate --strategy linear_proxy --name m --synth "
      "'{\"generator\":\"power_law\",\"n\":40,\"seed\":2}'");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "m_linear_proxy_conditional_eps0.1.csv"));
  fs::remove_all(dir);
}

}  // namespace
