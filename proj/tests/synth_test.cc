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

#include "dpfair/synth.h"

#include <algorithm>
#include <sstream>

#include "dpfair/ingest.h"
#include "gtest/gtest.h"

namespace dpfair {
namespace {

TEST(PowerLawTest, RangeDeterminismAndSkew) {
  auto a = PowerLawCounts(1000, 2, 10, 1e5, 7);
  auto b = PowerLawCounts(1000, 2, 10, 1e5, 7);
  auto c = PowerLawCounts(1000, 2, 10, 1e5, 8);
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(*a, *b);
  EXPECT_NE(*a, *c);
  auto col = a->Column(0);
  for (double v : col) {
    EXPECT_GE(v, 10);
    EXPECT_LE(v, 1e5);
    EXPECT_EQ(v, std::round(v));
  }
  std::sort(col.begin(), col.end());
  // Heavy tail: the median sits near 2 * min for exponent 2.
  EXPECT_LT(col[500], 40);
  EXPECT_GT(col.back(), 1000);
  EXPECT_EQ(a->entity_ids()[0], "d000");
  EXPECT_EQ(a->entity_ids()[999], "d999");
}

TEST(PowerLawTest, Errors) {
  EXPECT_FALSE(PowerLawCounts(0, 2, 1, 10, 0).ok());
  EXPECT_FALSE(PowerLawCounts(5, 2, 10, 1, 0).ok());
  EXPECT_FALSE(PowerLawCounts(5, -1, 1, 10, 0).ok());
  EXPECT_FALSE(PowerLawCounts(5, 2, 0, 10, 0).ok());
  EXPECT_TRUE(PowerLawCounts(5, 1, 1, 10, 0).ok());
}

TEST(LinearRampTest, OneToN) {
  auto r = LinearRamp(4);
  EXPECT_EQ(r->Column(0), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(r->entity_ids()[3], "r3");
}

TEST(MinorityCountiesTest, Ranges) {
  auto d = MinorityCounties(2000, 3);
  ASSERT_TRUE(d.ok());
  for (size_t i = 0; i < d->num_entities(); ++i) {
    const double xs = d->at(i, 0), xsp = d->at(i, 1), xspe = d->at(i, 2);
    EXPECT_GE(xs, 80);
    EXPECT_LE(xs, 1e7);
    EXPECT_GE(xsp, 1);
    EXPECT_LE(xsp, 0.12 * xs + 1);
    EXPECT_GE(xspe, 0);
    EXPECT_LE(xspe, xsp);
  }
}

TEST(GenerateFromJsonTest, Dispatch) {
  auto p = GenerateFromJson({{"generator", "power_law"}, {"n", 3}, {"seed", 2}});
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(*p, *PowerLawCounts(3, 2, 10, 1e5, 2));
  EXPECT_TRUE(GenerateFromJson({{"generator", "linear_ramp"}, {"n", 3}}).ok());
  EXPECT_TRUE(
      GenerateFromJson({{"generator", "minority_counties"}, {"n", 3}}).ok());
  EXPECT_FALSE(GenerateFromJson({{"generator", "zipf"}, {"n", 3}}).ok());
  EXPECT_FALSE(GenerateFromJson({{"n", 3}}).ok());
  EXPECT_FALSE(GenerateFromJson({{"generator", "linear_ramp"}, {"n", "x"}})
                   .ok());
}

TEST(CsvWritersTest, RoundTripThroughIngest) {
  auto d = *PowerLawCounts(20, 2, 10, 1e5, 1);
  std::istringstream a(AllotmentToCsv(d));
  auto back = ParseAllotmentCsv(a, {});
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->data, d);

  auto m = *MinorityCounties(20, 1);
  std::istringstream b(MinorityToCsv(m));
  auto mback = ParseMinorityCsv(b, {});
  ASSERT_TRUE(mback.ok()) << mback.status();
  EXPECT_EQ(mback->data, m);
}

}  // namespace
}  // namespace dpfair
