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

#ifndef DPFAIR_RNG_H_
#define DPFAIR_RNG_H_

#include <cstdint>
#include <random>

namespace dpfair {

// A reproducible random stream keyed by (master_seed, stream_id).
//
// Two streams with the same key produce the same sequence. Streams with
// different keys are seeded through std::seed_seq and are treated as
// independent. Monte Carlo code never shares a stream between workers; it
// derives one substream per unit of work with Substream().
class RngStream {
 public:
  RngStream(uint64_t master_seed, uint64_t stream_id);

  uint64_t master_seed() const { return master_seed_; }
  uint64_t stream_id() const { return stream_id_; }

  // Child stream for work item `index`. Depends only on this stream's key
  // and `index`, never on how many draws were already taken.
  RngStream Substream(uint64_t index) const;

  uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1): 53 random bits, offset by half an
  // ulp so that neither endpoint is reachable.
  double NextOpenUniform();

 private:
  uint64_t master_seed_;
  uint64_t stream_id_;
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive substream ids.
uint64_t MixBits(uint64_t x);

}  // namespace dpfair

#endif  // DPFAIR_RNG_H_
