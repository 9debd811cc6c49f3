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

#include "dpfair/predicate.h"
#include "dpfair/rng.h"

#include "gtest/gtest.h"
#include "oracles.h"

namespace dpfair {
namespace {

Dataset County(double xs, double xsp, double xspe) {
  return *Dataset::Create({"c"}, {"x_s", "x_sp", "x_spe"}, {xs, xsp, xspe},
                          DataKind::kRaw);
}

TEST(PredicateTest, LovingCountyRatioIsNotAboveFivePercent) {
  Predicate p = Predicate::Leaf(RatioThreshold{"x_sp", "x_s", 0.05});
  auto d = EvalPredicate(p, County(80, 4, 0), 0);
  ASSERT_TRUE(d.ok());
  EXPECT_FALSE(d->value);
  EXPECT_FALSE(d->degenerate);
}

TEST(PredicateTest, UnionCounty) {
  Predicate p = Predicate::Leaf(RatioThreshold{"x_sp", "x_s", 0.05});
  EXPECT_FALSE(EvalPredicate(p, County(3305, 160, 0), 0)->value);
}

TEST(PredicateTest, CountThresholdStrict) {
  Predicate p = Predicate::Leaf(
      CountThreshold{"x_sp", 1e4, Comparator::kGreater});
  EXPECT_TRUE(EvalPredicate(p, County(1e5, 10001, 0), 0)->value);
  EXPECT_FALSE(EvalPredicate(p, County(1e5, 10000, 0), 0)->value);
  Predicate q = Predicate::Leaf(CountThreshold{"x_sp", 1e4});
  EXPECT_TRUE(EvalPredicate(q, County(1e5, 10000, 0), 0)->value);
}

TEST(PredicateTest, LanguageAssistanceRule) {
  const Predicate rule = LanguageAssistanceRule();
  // 10% Hispanic, 2% of them limited English: both conjuncts hold.
  EXPECT_TRUE(EvalPredicate(rule, County(1000, 100, 2), 0)->value);
  // Large Hispanic population keeps the first conjunct true.
  EXPECT_TRUE(EvalPredicate(rule, County(1e6, 20000, 300), 0)->value);
  // Second conjunct fails.
  EXPECT_FALSE(EvalPredicate(rule, County(1000, 100, 1), 0)->value);
  // Zero Hispanic population makes the second ratio degenerate.
  auto d = EvalPredicate(rule, County(1000, 0, 0), 0);
  EXPECT_FALSE(d->value);
  EXPECT_TRUE(d->degenerate);
}

TEST(PredicateTest, CompositionMatchesTruthTables) {
  auto data = *Dataset::Create({"e"}, {"u", "v"}, {0, 0}, DataKind::kReleased);
  const Predicate u = Predicate::Leaf(CountThreshold{"u", 0.5});
  const Predicate v = Predicate::Leaf(CountThreshold{"v", 0.5});
  const std::pair<BoolOp, oracle::Op> ops[] = {
      {BoolOp::kAnd, oracle::Op::kAnd},
      {BoolOp::kOr, oracle::Op::kOr},
      {BoolOp::kXor, oracle::Op::kXor}};
  for (auto [op, ref] : ops) {
    const Predicate p = Predicate::Combine(op, u, v);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        data.at(0, 0) = a;
        data.at(0, 1) = b;
        EXPECT_EQ(EvalPredicate(p, data, 0)->value, oracle::Apply(ref, a, b))
            << BoolOpName(op) << " " << a << b;
      }
    }
  }
}

TEST(PredicateTest, JsonRoundTripIsLossless) {
  const Predicate rule = LanguageAssistanceRule();
  const auto j = rule.ToJson();
  auto back = Predicate::FromJson(j);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_TRUE(*back == rule);
  EXPECT_EQ(back->ToJson(), j);
  const Predicate x = Predicate::Combine(
      BoolOp::kXor, Predicate::Leaf(CountThreshold{"a", 3.25}),
      Predicate::Leaf(RatioThreshold{"a", "b", 0.5, Comparator::kGreaterEqual,
                                     true}));
  EXPECT_TRUE(*Predicate::FromJson(x.ToJson()) == x);
}

TEST(PredicateTest, CanonicalJsonShape) {
  const auto j = Predicate::Leaf(RatioThreshold{"x_sp", "x_s", 0.05}).ToJson();
  EXPECT_EQ(j["leaf"], "ratio");
  EXPECT_EQ(j["num"], "x_sp");
  EXPECT_EQ(j["den"], "x_s");
  EXPECT_EQ(j["level"], 0.05);
  EXPECT_EQ(j["cmp"], ">");
  auto parsed = Predicate::FromJson(nlohmann::json::parse(
      R"({"op":"and","l":{"leaf":"count","attr":"u","level":1,"cmp":">="},
          "r":{"leaf":"ratio","num":"x_sp","den":"x_s","level":0.05,"cmp":">"}})"));
  ASSERT_TRUE(parsed.ok()) << parsed.status();
}

TEST(PredicateTest, FromJsonRejectsMalformed) {
  EXPECT_FALSE(Predicate::FromJson(nlohmann::json::parse(R"({"op":"nand"})"))
                   .ok());
  EXPECT_FALSE(
      Predicate::FromJson(nlohmann::json::parse(R"({"leaf":"count"})")).ok());
  EXPECT_FALSE(Predicate::FromJson(nlohmann::json::parse(
                   R"({"leaf":"count","attr":"u","level":1,"cmp":"<"})"))
                   .ok());
}

TEST(PredicateTest, ValidateChecksAttributesAndProportions) {
  const Predicate p = Predicate::Leaf(CountThreshold{"missing", 1});
  EXPECT_FALSE(p.Validate({"x_s"}).ok());
  const Predicate q = Predicate::Leaf(
      RatioThreshold{"a", "b", 1.5, Comparator::kGreater, true});
  EXPECT_FALSE(q.Validate({"a", "b"}).ok());
  EXPECT_TRUE(LanguageAssistanceRule().Validate({"x_s", "x_sp", "x_spe"}).ok());
}

TEST(BoundPredicateTest, AgreesWithEvalPredicate) {
  const Predicate rule = LanguageAssistanceRule();
  auto bound = BoundPredicate::Bind(rule, {"x_s", "x_sp", "x_spe"});
  ASSERT_TRUE(bound.ok());
  RngStream rng(4, 0);
  for (int t = 0; t < 2000; ++t) {
    const double xs = 1 + 1e5 * rng.NextOpenUniform();
    const double xsp = xs * 0.15 * rng.NextOpenUniform() - 5;
    const double xspe = xsp * 0.03 * rng.NextOpenUniform();
    auto d = *Dataset::Create({"c"}, {"x_s", "x_sp", "x_spe"}, {xs, xsp, xspe},
                              DataKind::kReleased);
    const Decision a = bound->Evaluate(d.row(0));
    const Decision b = *EvalPredicate(rule, d, 0);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.degenerate, b.degenerate);
  }
}

}  // namespace
}  // namespace dpfair
