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

#include "dpfair/rng.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace dpfair {
namespace {

TEST(RngStreamTest, SameKeySameSequence) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngStreamTest, DifferentStreamsDiffer) {
  RngStream a(42, 0), b(42, 1), c(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t x = a.NextU64();
    same_ab += x == b.NextU64();
    same_ac += x == c.NextU64();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(RngStreamTest, SubstreamIgnoresParentPosition) {
  RngStream parent(5, 3);
  RngStream first = parent.Substream(9);
  for (int i = 0; i < 100; ++i) parent.NextU64();
  RngStream second = parent.Substream(9);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(first.NextU64(), second.NextU64());
  EXPECT_NE(parent.Substream(1).NextU64(), parent.Substream(2).NextU64());
}

TEST(RngStreamTest, OpenUniformStaysInsideUnitInterval) {
  RngStream rng(1, 1);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.NextOpenUniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(RngStreamTest, IndependentStreamsAreUncorrelated) {
  RngStream a(9, 0), b(9, 1);
  const int n = 100000;
  double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.NextOpenUniform(), y = b.NextOpenUniform();
    sx += x;
    sy += y;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double cov = sxy / n - sx / n * sy / n;
  const double r = cov / std::sqrt((sxx / n - sx * sx / n / n) *
                                   (syy / n - sy * sy / n / n));
  EXPECT_LT(std::fabs(r), 0.02);
}

TEST(MixBitsTest, IsBijectiveOnSmallSample) {
  std::vector<uint64_t> out;
  for (uint64_t i = 0; i < 10000; ++i) out.push_back(MixBits(i));
  std::sort(out.begin(), out.end());
  EXPECT_EQ(std::adjacent_find(out.begin(), out.end()), out.end());
}

}  // namespace
}  // namespace dpfair
