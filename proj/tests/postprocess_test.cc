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

#include "dpfair/postprocess.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"

namespace dpfair {
namespace {

TEST(ClipLowerTest, Examples) {
  EXPECT_EQ(ClipLowerValue(-3, 0), 0);
  EXPECT_EQ(ClipLowerValue(5, 0), 5);
  EXPECT_EQ(ClipLowerValue(0.4, 1), 1);
}

TEST(ExpectedClippedTest, Formula) {
  EXPECT_DOUBLE_EQ(*ExpectedClipped(100, 0, 10), 100 + 5 * std::exp(-10.0));
  EXPECT_NEAR(*ExpectedClipped(1, 0, 10), 1 + 5 * std::exp(-0.1), 1e-12);
  EXPECT_FALSE(ExpectedClipped(0, 0, 10).ok());
  EXPECT_FALSE(ExpectedClipped(-1, 0, 10).ok());
  EXPECT_FALSE(ExpectedClipped(1, 0, 0).ok());
}

TEST(ExpectedClippedTest, BiasNeverExceedsHalfScale) {
  for (double gap : {1e-9, 1e-3, 0.5, 3.0, 50.0}) {
    for (double scale : {0.1, 1.0, 10.0}) {
      const double bias = *ExpectedClipped(gap, 0, scale) - gap;
      EXPECT_LE(bias, scale / 2);
      EXPECT_GE(bias, 0);
      // Far from the floor the excess underflows.
      if (gap / scale <= 5) EXPECT_GT(bias, 0);
    }
  }
  EXPECT_NEAR(*ExpectedClipped(1e-12, 0, 4) - 1e-12, 2.0, 1e-9);
}

TEST(ExpectedClippedTest, MatchesMonteCarloMean) {
  RngStream rng(11, 0);
  const int m = 1000000;
  double sum = 0, sum_sq = 0;
  for (int s = 0; s < m; ++s) {
    const double v = ClipLowerValue(1 + DrawLaplace(10, rng), 0);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / m;
  const double se = std::sqrt((sum_sq / m - mean * mean) / m);
  EXPECT_NEAR(mean, *ExpectedClipped(1, 0, 10), 3 * se);
  EXPECT_NEAR(*ExpectedClipped(1, 0, 10), 5.524, 1e-3);
}

TEST(StochasticRoundTest, IntegralInputIsFixed) {
  RngStream rng(12, 0);
  for (int s = 0; s < 1000; ++s) EXPECT_EQ(StochasticRoundValue(3.0, rng), 3);
}

TEST(StochasticRoundTest, UnbiasedWithCorrectSupport) {
  for (double z : {2.25, -1.5, 0.9, -0.01}) {
    RngStream rng(13, 0);
    const int m = 1000000;
    std::map<int64_t, int> freq;
    double sum = 0;
    for (int s = 0; s < m; ++s) {
      const int64_t r = StochasticRoundValue(z, rng);
      ++freq[r];
      sum += static_cast<double>(r);
    }
    const double lo = std::floor(z);
    const double p = z - lo;
    ASSERT_EQ(freq.size(), 2u) << z;
    EXPECT_EQ(freq.begin()->first, static_cast<int64_t>(lo));
    EXPECT_NEAR(sum / m, z, 4 * std::sqrt(p * (1 - p) / m)) << z;
    EXPECT_NEAR(static_cast<double>(freq.rbegin()->second) / m, p, 0.002);
  }
}

TEST(ProjectSumTest, Examples) {
  const std::vector<double> z{0.2, 0.3};
  const auto out = ProjectSumValues(z, 1);
  EXPECT_DOUBLE_EQ(out[0], 0.45);
  EXPECT_DOUBLE_EQ(out[1], 0.55);
  const std::vector<double> on{0.25, 0.75};
  EXPECT_EQ(ProjectSumValues(on, 1), on);
}

TEST(ProjectSumTest, SumsToTargetAndIsIdempotent) {
  RngStream rng(14, 0);
  for (int t = 0; t < 500; ++t) {
    const size_t n = 1 + rng.NextU64() % 60;
    std::vector<double> z(n);
    for (double& v : z) v = 200 * (rng.NextOpenUniform() - 0.5);
    const double target = 100 * (rng.NextOpenUniform() - 0.3);
    const auto once = ProjectSumValues(z, target);
    EXPECT_NEAR(std::accumulate(once.begin(), once.end(), 0.0), target, 1e-9);
    EXPECT_EQ(ProjectSumValues(once, target), once);
  }
}

TEST(ProjectSumTest, BeatsRandomFeasiblePoints) {
  RngStream rng(15, 0);
  const std::vector<double> z{0.9, -0.2, 0.4, 0.05};
  const auto proj = ProjectSumValues(z, 1);
  auto dist = [&](const std::vector<double>& p) {
    double d = 0;
    for (size_t i = 0; i < z.size(); ++i) d += (p[i] - z[i]) * (p[i] - z[i]);
    return d;
  };
  const double best = dist(proj);
  for (int s = 0; s < 100000; ++s) {
    std::vector<double> p(z.size());
    double partial = 0;
    for (size_t i = 0; i + 1 < p.size(); ++i) {
      p[i] = proj[i] + 0.5 * (rng.NextOpenUniform() - 0.5);
      partial += p[i];
    }
    p.back() = 1 - partial;
    EXPECT_GE(dist(p), best - 1e-15);
  }
}

TEST(ProjectSumTest, BiasMapIsExactOnDyadicBiases) {
  RngStream rng(23, 0);
  for (size_t n : {2, 8, 64}) {
    std::vector<double> b(n);
    for (double& v : b) {
      v = std::ldexp(static_cast<double>(rng.NextU64() % (1u << 20)) -
                         (1u << 19),
                     -20);
    }
    const auto mapped = ProjectSumValues(b, 0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t k = 0; k < n; ++k) {
        EXPECT_EQ(mapped[i] - mapped[k], b[i] - b[k]);
      }
    }
  }
}

TEST(ProjectSumTest, BiasMapPreservesPairwiseDifferences) {
  RngStream rng(16, 0);
  for (int t = 0; t < 200; ++t) {
    const size_t n = 2 + rng.NextU64() % 30;
    std::vector<double> b(n);
    for (double& v : b) v = rng.NextOpenUniform() - 0.5;
    const auto mapped = ProjectSumValues(b, 0);
    const double shift = mapped[0] - b[0];
    for (size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(mapped[i] - b[i], shift, 1e-15);
    }
    const auto [lo, hi] = std::minmax_element(b.begin(), b.end());
    const auto [mlo, mhi] = std::minmax_element(mapped.begin(), mapped.end());
    EXPECT_NEAR(*mhi - *mlo, *hi - *lo, 1e-15);
  }
}

TEST(TemperatureClipTest, ZeroTemperatureIsClip) {
  for (double z = -20; z <= 20; z += 0.37) {
    for (double level : {-3.0, 0.0, 2.5}) {
      EXPECT_EQ(TemperatureClipValue(z, level, 0), ClipLowerValue(z, level));
    }
  }
}

TEST(TemperatureClipTest, StepByStep) {
  EXPECT_EQ(TemperatureClipValue(0.5, 0, 1), 0);
  EXPECT_DOUBLE_EQ(TemperatureClipValue(2, 0, 1), 2 - 1.0 / 3);
  EXPECT_NEAR(TemperatureClipValue(1e7, 0, 5), 1e7, 1e-6);
}

TEST(TemperatureClipTest, NeverBelowLevel) {
  for (double z = -50; z <= 50; z += 0.73) {
    for (double level : {-5.0, 0.0, 7.0}) {
      for (double t : {0.0, 0.1, 1.0, 10.0, 1000.0}) {
        EXPECT_GE(TemperatureClipValue(z, level, t), level);
      }
    }
  }
}

TEST(PipelineTest, JsonRoundTrip) {
  const Pipeline p{ClipLower{0}, StochasticRound{}, ProjectSum{1.5},
                   TemperatureClip{1, 2.5}};
  auto back = PipelineFromJson(PipelineToJson(p));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, p);
  EXPECT_EQ(PipelineToJson(p).dump(),
            R"([{"clip_lower":0.0},"stochastic_round",{"project_sum":1.5},)"
            R"({"temperature_clip":{"T":2.5,"level":1.0}}])");
}

TEST(PipelineTest, RejectsBadSteps) {
  EXPECT_FALSE(PipelineFromJson(nlohmann::json::parse(R"(["nope"])")).ok());
  EXPECT_FALSE(PipelineFromJson(nlohmann::json::parse(R"({"a":1})")).ok());
  EXPECT_FALSE(
      PipelineFromJson(nlohmann::json::parse(R"([{"clip_lower":"x"}])")).ok());
  EXPECT_FALSE(ValidateStep(TemperatureClip{0, -1}).ok());
  EXPECT_FALSE(ValidateStep(ProjectSum{INFINITY}).ok());
}

TEST(PipelineTest, ApplyOrder) {
  auto d = *Dataset::FromColumn({-2.0, 0.25, 3.5}, "v", DataKind::kReleased);
  RngStream rng(17, 0);
  ASSERT_TRUE(ApplyPipeline({ClipLower{0}, ProjectSum{6}}, d, rng).ok());
  EXPECT_DOUBLE_EQ(d.at(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(d.at(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.at(2, 0), 4.25);
  ASSERT_TRUE(ApplyPipeline(NonNegativeIntegerPipeline(), d, rng).ok());
  for (double v : d.values()) EXPECT_EQ(v, std::floor(v));
}

TEST(TuneTemperatureTest, SingleCandidateZero) {
  auto spec = *PrivacySpec::Create(1);
  const std::vector<double> domain{1, 2, 5}, grid{0};
  auto t = TuneTemperature(domain, 0, spec, grid, 2000, RngStream(18, 0));
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(t->best_temperature, 0);
  EXPECT_EQ(t->best_score, t->baseline_score);
}

TEST(TuneTemperatureTest, FarFromBoundaryPicksSmallest) {
  auto spec = *PrivacySpec::Create(1);
  const std::vector<double> domain{1e6}, grid{0.5, 0.1, 0.3};
  auto t = TuneTemperature(domain, 0, spec, grid, 100, RngStream(19, 0));
  ASSERT_TRUE(t.ok());
  for (double s : t->scores) EXPECT_EQ(s, 0);
  EXPECT_EQ(t->best_temperature, 0.1);
}

TEST(TuneTemperatureTest, ReducesSpreadInSmallCountRegime) {
  auto spec = *PrivacySpec::Create(0.1);
  std::vector<double> domain(200);
  std::iota(domain.begin(), domain.end(), 1.0);
  const auto grid = DefaultTemperatureGrid(spec.scale(), 20);
  auto t = TuneTemperature(domain, 0, spec, grid, 4000, RngStream(20, 0));
  ASSERT_TRUE(t.ok());
  EXPECT_LT(t->best_score, t->baseline_score);
}

TEST(TuneTemperatureTest, Errors) {
  auto spec = *PrivacySpec::Create(1);
  const std::vector<double> empty, one{1}, bad{-1};
  EXPECT_FALSE(TuneTemperature(empty, 0, spec, one, 10, RngStream(0, 0)).ok());
  EXPECT_FALSE(TuneTemperature(one, 0, spec, empty, 10, RngStream(0, 0)).ok());
  EXPECT_FALSE(TuneTemperature(bad, 0, spec, one, 10, RngStream(0, 0)).ok());
  EXPECT_FALSE(TuneTemperature(one, 0, spec, bad, 10, RngStream(0, 0)).ok());
}

}  // namespace
}  // namespace dpfair
