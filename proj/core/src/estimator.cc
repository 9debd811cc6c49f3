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

#include "dpfair/estimator.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include "absl/strings/str_cat.h"

namespace dpfair {
namespace {

constexpr int64_t kMaxBlocks = 64;

struct Block {
  int64_t begin = 0;
  int64_t end = 0;
  std::vector<EntityMoments> moments;
  absl::Status status;
};

void RunBlock(Block& block, const RngStream& root, uint64_t block_index,
              bool antithetic, TrialFn& trial, std::vector<double>& first,
              std::vector<double>& second, std::vector<int64_t>& degenerate) {
  RngStream rng = root.Substream(block_index);
  std::span<double> second_span;
  if (antithetic) second_span = second;
  for (int64_t t = block.begin; t < block.end; ++t) {
    std::fill(degenerate.begin(), degenerate.end(), 0);
    if (auto s = trial(rng, first, second_span, degenerate); !s.ok()) {
      block.status = s;
      return;
    }
    for (size_t i = 0; i < first.size(); ++i) {
      EntityMoments& em = block.moments[i];
      if (antithetic) {
        em.deviation.Add(0.5 * (first[i] + second[i]));
        em.abs_deviation.Add(0.5 * (std::fabs(first[i]) + std::fabs(second[i])));
      } else {
        em.deviation.Add(first[i]);
        em.abs_deviation.Add(std::fabs(first[i]));
      }
      em.degenerate_draws += degenerate[i];
    }
  }
}

}  // namespace

void Moments::Add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void Moments::Merge(const Moments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
}

double Moments::variance() const {
  if (count_ < 2) return 0.0;
  return m2_ / static_cast<double>(count_ - 1);
}

double Moments::std_error() const {
  if (count_ < 1) return 0.0;
  return std::sqrt(variance() / static_cast<double>(count_));
}

absl::Status ValidateEstimatorOptions(const EstimatorOptions& options) {
  if (options.samples < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 2 samples, got ", options.samples));
  }
  if (options.sampling == Sampling::kAntithetic && options.samples % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "antithetic sampling needs an even sample count, got ",
        options.samples));
  }
  if (options.shard_count < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("shard_count must be >= 1, got ", options.shard_count));
  }
  return absl::OkStatus();
}

absl::StatusOr<MonteCarloResult> RunMonteCarlo(size_t num_entities,
                                               const EstimatorOptions& options,
                                               const TrialFactory& factory) {
  if (auto s = ValidateEstimatorOptions(options); !s.ok()) return s;
  const bool antithetic = options.sampling == Sampling::kAntithetic;
  const int64_t trials = antithetic ? options.samples / 2 : options.samples;
  const int64_t num_blocks = std::min(kMaxBlocks, trials);

  std::vector<Block> blocks(num_blocks);
  for (int64_t b = 0; b < num_blocks; ++b) {
    blocks[b].begin = trials * b / num_blocks;
    blocks[b].end = trials * (b + 1) / num_blocks;
    blocks[b].moments.resize(num_entities);
  }
  const RngStream root(options.master_seed, options.stream_id);

  auto worker = [&](int shard) {
    TrialFn trial = factory();
    std::vector<double> first(num_entities);
    std::vector<double> second(num_entities);
    std::vector<int64_t> degenerate(num_entities);
    for (int64_t b = shard; b < num_blocks; b += options.shard_count) {
      RunBlock(blocks[b], root, static_cast<uint64_t>(b), antithetic, trial,
               first, second, degenerate);
    }
  };
  const int shards =
      static_cast<int>(std::min<int64_t>(options.shard_count, num_blocks));
  if (shards == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(shards);
    for (int s = 0; s < shards; ++s) threads.emplace_back(worker, s);
    for (auto& t : threads) t.join();
  }

  MonteCarloResult result;
  result.samples = options.samples;
  result.trials = trials;
  result.entities.resize(num_entities);
  for (const Block& block : blocks) {
    if (!block.status.ok()) return block.status;
    for (size_t i = 0; i < num_entities; ++i) {
      EntityMoments& dst = result.entities[i];
      dst.deviation.Merge(block.moments[i].deviation);
      dst.abs_deviation.Merge(block.moments[i].abs_deviation);
      dst.degenerate_draws += block.moments[i].degenerate_draws;
    }
  }
  return result;
}

}  // namespace dpfair
