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

#ifndef DPFAIR_ESTIMATOR_H_
#define DPFAIR_ESTIMATOR_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/rng.h"

namespace dpfair {

enum class Sampling {
  // Every draw is an independent mechanism run.
  kIndependent,
  // Draws come in mirrored pairs (x + eta, x - eta). Each half is still a
  // mechanism run; odd-order noise terms cancel inside a pair.
  kAntithetic,
};

struct EstimatorOptions {
  // Number of mechanism draws m. Must be even for antithetic sampling.
  int64_t samples = 10000;
  uint64_t master_seed = 0;
  // Root stream for this estimate; callers running several estimates from
  // one seed give each its own id.
  uint64_t stream_id = 0;
  int shard_count = 1;
  Sampling sampling = Sampling::kIndependent;
};

// Streaming mean/variance (Welford), mergeable with Chan's update.
class Moments {
 public:
  void Add(double x);
  void Merge(const Moments& other);

  int64_t count() const { return count_; }
  double mean() const { return mean_; }
  // Unbiased sample variance; zero below two observations.
  double variance() const;
  double std_error() const;

 private:
  int64_t count_ = 0;
  double mean_ = 0;
  double m2_ = 0;
};

// Per-entity accumulated deviations (output minus true output).
struct EntityMoments {
  Moments deviation;
  Moments abs_deviation;
  int64_t degenerate_draws = 0;
};

// One trial writes per-entity deviations for a single draw into `first`.
// In antithetic mode it also writes the mirrored draw into `second`
// (otherwise `second` is empty). `degenerate` counts flagged draws and may
// be left untouched.
using TrialFn = std::function<absl::Status(
    RngStream& rng, std::span<double> first, std::span<double> second,
    std::span<int64_t> degenerate)>;

// Builds the per-worker trial closure; each shard calls it once, so the
// closure may own scratch buffers.
using TrialFactory = std::function<TrialFn()>;

struct MonteCarloResult {
  std::vector<EntityMoments> entities;
  // Draws actually taken (== options.samples).
  int64_t samples = 0;
  // Independent trial values behind each std error: m, or m/2 pairs.
  int64_t trials = 0;
};

// Runs options.samples draws over `num_entities` outputs.
//
// The draws are cut into a block decomposition that depends only on the
// trial count; block b uses substream b of (master_seed, stream_id) and
// blocks are merged in index order. Results are therefore bit-identical for
// any shard_count and any thread schedule.
absl::StatusOr<MonteCarloResult> RunMonteCarlo(size_t num_entities,
                                               const EstimatorOptions& options,
                                               const TrialFactory& factory);

absl::Status ValidateEstimatorOptions(const EstimatorOptions& options);

}  // namespace dpfair

#endif  // DPFAIR_ESTIMATOR_H_
