// Copyright 2026 The gbx Authors
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

#include "gbx/prng.hpp"

#include <mutex>
#include <string>

#include "gbx/error.hpp"

namespace gbx {

void PrngSpec::validate() const {
  if (seed == 0) {
    throw Error(ErrorCode::kInvalidSeed, "xorshift seed must be non-zero");
  }
  if (n_items == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_items must be at least 1");
  }
}

namespace xorshift64star {

std::uint64_t advance(std::uint64_t s, std::uint64_t steps) noexcept {
  for (std::uint64_t i = 0; i < steps; ++i) s = step(s);
  return s;
}

}  // namespace xorshift64star

std::uint64_t prng_run(const PrngSpec& spec) {
  spec.validate();
  return xorshift64star::output(xorshift64star::advance(spec.seed, spec.n_items));
}

std::uint64_t inject_corruption(const PrngSpec& spec,
                                std::uint64_t flip_iteration,
                                unsigned bit_index) {
  spec.validate();
  if (flip_iteration < 1 || flip_iteration > spec.n_items) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "flip iteration " + std::to_string(flip_iteration) +
                    " outside [1, " + std::to_string(spec.n_items) + "]");
  }
  if (bit_index > 63) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "bit index " + std::to_string(bit_index) + " outside [0, 63]");
  }
  std::uint64_t s = xorshift64star::advance(spec.seed, flip_iteration);
  s ^= std::uint64_t{1} << bit_index;
  s = xorshift64star::advance(s, spec.n_items - flip_iteration);
  return xorshift64star::output(s);
}

std::uint64_t GoldenCache::golden_value(const PrngSpec& spec) {
  spec.validate();
  std::uint64_t from_step = 0;
  std::uint64_t state = spec.seed;
  {
    std::shared_lock lock(mutex_);
    if (const auto seed_it = states_.find(spec.seed); seed_it != states_.end()) {
      const auto& by_n = seed_it->second;
      auto it = by_n.upper_bound(spec.n_items);
      if (it != by_n.begin()) {
        --it;
        from_step = it->first;
        state = it->second;
      }
    }
  }
  if (from_step == spec.n_items) return xorshift64star::output(state);

  state = xorshift64star::advance(state, spec.n_items - from_step);
  steps_.fetch_add(spec.n_items - from_step, std::memory_order_relaxed);
  {
    std::unique_lock lock(mutex_);
    states_[spec.seed].emplace(spec.n_items, state);
  }
  return xorshift64star::output(state);
}

std::uint64_t golden_value(const PrngSpec& spec) {
  static GoldenCache cache;
  return cache.golden_value(spec);
}

}  // namespace gbx
