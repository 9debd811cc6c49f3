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

#include "dpfair/ingest.h"

#include <sstream>

#include "gtest/gtest.h"

namespace dpfair {
namespace {

absl::StatusOr<IngestResult> Allot(const std::string& text,
                                   IngestOptions o = {}) {
  std::istringstream in(text);
  return ParseAllotmentCsv(in, o);
}

absl::StatusOr<IngestResult> Minority(const std::string& text,
                                      IngestOptions o = {}) {
  std::istringstream in(text);
  return ParseMinorityCsv(in, o);
}

TEST(AllotmentCsvTest, DefaultsWeightsToOne) {
  auto r = Allot("district_id,count\nd1,10\nd2,200\n");
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->data.entity_ids(), (std::vector<std::string>{"d1", "d2"}));
  EXPECT_EQ(r->data.Column(0), (std::vector<double>{10, 200}));
  EXPECT_EQ(r->weights, (std::vector<double>{1, 1}));
  EXPECT_TRUE(r->data.is_raw());
}

TEST(AllotmentCsvTest, WeightColumnAnyOrderAndCrlf) {
  auto r = Allot("weight,count,district_id\r\n2.5,7,a\r\n1,0,b\r\n");
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->weights, (std::vector<double>{2.5, 1}));
  EXPECT_EQ(r->data.Column(0), (std::vector<double>{7, 0}));
}

TEST(AllotmentCsvTest, MissingRowsDroppedWithWarning) {
  auto r = Allot("district_id,count\na,1\nb,NULL\nc,\nd,NA\ne,4\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->data.num_entities(), 2u);
  EXPECT_EQ(r->dropped_missing, 3);
  ASSERT_EQ(r->warnings.size(), 1u);
}

TEST(AllotmentCsvTest, Errors) {
  auto neg = Allot("district_id,count\na,1\nb,-3\n");
  ASSERT_FALSE(neg.ok());
  EXPECT_NE(neg.status().message().find("line 3"), std::string::npos);
  EXPECT_FALSE(Allot("district_id,count\na,1.5\n").ok());
  EXPECT_FALSE(Allot("district_id,count\na,abc\n").ok());
  EXPECT_FALSE(Allot("district_id,count,weight\na,1,0\n").ok());
  EXPECT_FALSE(Allot("district_id\na\n").ok());
  EXPECT_FALSE(Allot("").ok());
}

TEST(AllotmentCsvTest, MinCountFilter) {
  IngestOptions o;
  o.min_count = 5;
  auto r = Allot("district_id,count\na,1\nb,5\nc,9\n", o);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->data.num_entities(), 2u);
  EXPECT_EQ(r->dropped_filtered, 1);
}

TEST(MinorityCsvTest, LovingCounty) {
  auto r = Minority("county_id,x_s,x_sp,x_spe\nLoving,80,4,0\n");
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->data.attributes(),
            (std::vector<std::string>{"x_s", "x_sp", "x_spe"}));
  EXPECT_EQ(r->data.at(0, 0), 80);
  EXPECT_EQ(r->data.at(0, 1), 4);
}

TEST(MinorityCsvTest, NullRowAndFilter) {
  IngestOptions o;
  o.require_minority_population = true;
  auto r = Minority(
      "county_id,x_s,x_sp,x_spe\na,100,0,0\nb,NULL,1,1\nc,3305,160,2\n", o);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->data.entity_ids(), (std::vector<std::string>{"c"}));
  EXPECT_EQ(r->dropped_missing, 1);
  EXPECT_EQ(r->dropped_filtered, 1);
  EXPECT_EQ(r->warnings.size(), 2u);
}

TEST(MinorityCsvTest, NegativeCountRejected) {
  auto r = Minority("county_id,x_s,x_sp,x_spe\na,100,-1,0\n");
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.status().message().find("line 2"), std::string::npos);
}

TEST(LoadTest, MissingFile) {
  EXPECT_EQ(LoadAllotmentCsv("/nonexistent/x.csv", {}).status().code(),
            absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace dpfair
