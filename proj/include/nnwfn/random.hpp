// Copyright 2026 The nnwfn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace nnwfn {

using Rng = std::mt19937_64;

/// Stream domains. Every independent random object draws from its own
/// (master seed, domain, index) stream so results do not depend on build order.
enum class StreamDomain : std::uint32_t {
  kFamily = 1,
  kLeafHash = 2,
  kSingleStage = 3,
  kWorkload = 4,
};

inline Rng derive_stream(std::uint64_t master_seed, StreamDomain domain,
                         std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(domain),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace nnwfn
