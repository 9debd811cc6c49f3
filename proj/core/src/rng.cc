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

namespace dpfair {
namespace {

std::mt19937_64 SeedEngine(uint64_t master_seed, uint64_t stream_id) {
  std::seed_seq seq{static_cast<uint32_t>(master_seed),
                    static_cast<uint32_t>(master_seed >> 32),
                    static_cast<uint32_t>(stream_id),
                    static_cast<uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

uint64_t MixBits(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(uint64_t master_seed, uint64_t stream_id)
    : master_seed_(master_seed),
      stream_id_(stream_id),
      engine_(SeedEngine(master_seed, stream_id)) {}

RngStream RngStream::Substream(uint64_t index) const {
  return RngStream(master_seed_, MixBits(MixBits(stream_id_) ^ index));
}

double RngStream::NextOpenUniform() {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * kScale;
}

}  // namespace dpfair
