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

#include "dpfair/report_io.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "absl/strings/str_split.h"
#include "dpfair/fairness.h"
#include "dpfair/mitigation.h"
#include "gtest/gtest.h"

namespace dpfair {
namespace {

FairnessReport Sample() {
  auto data = *Dataset::FromColumn({30, 10, 20, 10}, "x");
  AuditOptions o;
  o.estimator.samples = 500;
  o.estimator.master_seed = 3;
  o.pipeline = {ClipLower{0}};
  auto r = EmpiricalBias(AllotmentTask{AllotmentProblem::Uniform(4), 0}, data,
                         *PrivacySpec::Create(0.3), o);
  return *r;
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0), "0");
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(-2.5), "-2.5");
  EXPECT_EQ(FormatDouble(1e-7), "1e-07");
  for (double v : {1.0 / 3, 6.02214076e23, -1e-300, 123456789.125}) {
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
}

TEST(ReportJsonTest, RoundTripIsExact) {
  const FairnessReport r = Sample();
  const auto j = ReportToJson(r);
  EXPECT_EQ(j["version"], Version());
  EXPECT_EQ(j["mode"], "signed");
  EXPECT_EQ(j["config"]["samples"], 500);
  auto back = ReportFromJson(j);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, r);
  auto reparsed = ReportFromJson(nlohmann::json::parse(j.dump()));
  ASSERT_TRUE(reparsed.ok());
  EXPECT_EQ(*reparsed, r);
}

TEST(ReportJsonTest, RejectsMalformed) {
  auto j = ReportToJson(Sample());
  j["mode"] = "sideways";
  EXPECT_FALSE(ReportFromJson(j).ok());
  j = ReportToJson(Sample());
  j.erase("per_entity");
  EXPECT_FALSE(ReportFromJson(j).ok());
  EXPECT_FALSE(ReportFromJson(nlohmann::json::array()).ok());
}

TEST(ReportCsvTest, HeaderAndStableSort) {
  const FairnessReport r = Sample();
  const std::string csv = ReportToCsv(r);
  std::vector<std::string> lines = absl::StrSplit(csv, '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0],
            "entity_id,true_value,expected_private_value,bias,abs_bias,"
            "std_error,disparity");
  // True shares 0.1, 0.1, 0.2, 0.3; the tie keeps input order (1 before 3).
  EXPECT_EQ(lines[1].substr(0, 2), "1,");
  EXPECT_EQ(lines[2].substr(0, 2), "3,");
  EXPECT_EQ(lines[3].substr(0, 2), "2,");
  EXPECT_EQ(lines[4].substr(0, 2), "0,");
  std::vector<std::string> f = absl::StrSplit(lines[4], ',');
  ASSERT_EQ(f.size(), 7u);
  EXPECT_EQ(std::stod(f[3]), r.per_entity[0].bias);
  EXPECT_EQ(std::stod(f[6]), r.disparity[0]);
}

TEST(CostCsvTest, RankedDescending) {
  CostOfPrivacyReport c;
  c.entity_ids = {"a", "b", "c"};
  c.per_entity_shortfall = {500, 0, 1000};
  c.total = 1500;
  c.budget = 1e6;
  EXPECT_EQ(CostOfPrivacyToCsv(c),
            "rank,entity_id,shortfall\n1,c,1000\n2,a,500\n3,b,0\n,total,1500\n");
}

TEST(AlphaTableTest, Summaries) {
  const FairnessReport r = Sample();
  const AlphaRow row = SummarizeReport("clip", r);
  EXPECT_EQ(row.alpha, r.alpha);
  EXPECT_EQ(row.epsilon, 0.3);
  EXPECT_EQ(row.pooled_std_error, PooledStdError(r));
  double worst = 0;
  for (const auto& e : r.per_entity) worst = std::max(worst, e.absolute_bias);
  EXPECT_EQ(row.max_abs_bias, worst);
  AlphaRow a{"x", 0.5, 0.25, 0.125, 1};
  EXPECT_EQ(AlphaTableToCsv({a}),
            "label,epsilon,alpha,pooled_std_error,max_abs_bias\n"
            "x,0.5,0.25,0.125,1\n");
}

TEST(TextFileTest, WriteThenRead) {
  const auto dir = std::filesystem::temp_directory_path() / "dpfair_io_test";
  std::filesystem::remove_all(dir);
  const std::string path = (dir / "nested" / "f.txt").string();
  ASSERT_TRUE(WriteTextFile(path, "hello\nworld\n").ok());
  EXPECT_EQ(*ReadTextFile(path), "hello\nworld\n");
  EXPECT_FALSE(ReadTextFile((dir / "missing").string()).ok());
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace dpfair
