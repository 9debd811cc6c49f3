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

#include <vector>

#include "benchmark/benchmark.h"
#include "dpfair/fairness.h"
#include "dpfair/mechanisms.h"
#include "dpfair/postprocess.h"
#include "dpfair/problems.h"
#include "dpfair/synth.h"

namespace dpfair {
namespace {

void BM_DrawLaplace(benchmark::State& state) {
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(DrawLaplace(10.0, rng));
}
BENCHMARK(BM_DrawLaplace);

void BM_ProjectSum(benchmark::State& state) {
  std::vector<double> v(state.range(0), 0.001);
  for (auto _ : state) benchmark::DoNotOptimize(ProjectSumValues(v, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProjectSum)->Arg(64)->Arg(4096);

// Allotment audit; the second argument is the shard count.
void BM_EmpiricalBiasPf(benchmark::State& state) {
  const size_t n = static_cast<size_t>(state.range(0));
  auto data = *PowerLawCounts(n, 2, 10, 1e5, 3);
  const Problem pf = AllotmentTask{AllotmentProblem::Uniform(n), 0};
  auto spec = *PrivacySpec::Create(0.1);
  AuditOptions o;
  o.estimator.samples = 2000;
  o.estimator.master_seed = 1;
  o.estimator.shard_count = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto r = EmpiricalBias(pf, data, spec, o);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * o.estimator.samples * n);
}
BENCHMARK(BM_EmpiricalBiasPf)
    ->Args({100, 1})
    ->Args({1000, 1})
    ->Args({1000, 4})
    ->Unit(benchmark::kMillisecond);

void BM_EmpiricalBiasThreshold(benchmark::State& state) {
  std::vector<double> x(500);
  for (size_t i = 0; i < x.size(); ++i) x[i] = 900 + static_cast<double>(i);
  auto data = *Dataset::FromColumn(x, "x");
  const Problem rule =
      DecisionTask{Predicate::Leaf(CountThreshold{"x", 1000})};
  auto spec = *PrivacySpec::Create(0.1);
  AuditOptions o;
  o.estimator.samples = 5000;
  o.estimator.master_seed = 1;
  for (auto _ : state) {
    auto r = EmpiricalBias(rule, data, spec, o);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_EmpiricalBiasThreshold)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpfair

BENCHMARK_MAIN();
