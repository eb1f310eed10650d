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

#ifndef GBX_PRNG_HPP_
#define GBX_PRNG_HPP_

#include <atomic>
#include <cstdint>
#include <map>
#include <shared_mutex>
#include <unordered_map>

#include "gbx/generator_constants.h"

namespace gbx {

// Experiment A workload: generate n_items numbers and report the last one.
struct PrngSpec {
  std::uint64_t seed = 1;
  std::uint64_t n_items = 1;

  // Throws Error(kInvalidSeed) for seed 0, Error(kInvalidArgument) for
  // n_items 0.
  void validate() const;

  friend bool operator==(const PrngSpec&, const PrngSpec&) = default;
};

namespace xorshift64star {

inline constexpr std::uint64_t kMultiplier = GBX_XORSHIFT_MULTIPLIER;

constexpr std::uint64_t step(std::uint64_t s) noexcept {
  s ^= s >> GBX_XORSHIFT_SHIFT_A;
  s ^= s << GBX_XORSHIFT_SHIFT_B;
  s ^= s >> GBX_XORSHIFT_SHIFT_C;
  return s;
}

constexpr std::uint64_t output(std::uint64_t s) noexcept {
  return s * kMultiplier;
}

// State after `steps` state steps starting from `s`.
std::uint64_t advance(std::uint64_t s, std::uint64_t steps) noexcept;

}  // namespace xorshift64star

std::uint64_t prng_run(const PrngSpec& spec);

// Flips bit_index of the state at 1-based iteration flip_iteration, then
// continues to N. Throws Error(kIndexOutOfRange) for out-of-range indices.
std::uint64_t inject_corruption(const PrngSpec& spec,
                                std::uint64_t flip_iteration,
                                unsigned bit_index);

// Thread-safe memo of generator states keyed by seed and step count.
// A query continues from the furthest cached state at or below N, so a
// whole size grid for one seed costs a single pass.
class GoldenCache {
 public:
  std::uint64_t golden_value(const PrngSpec& spec);

  // Total generator steps computed by this cache (cache hits add nothing).
  std::uint64_t steps_computed() const noexcept {
    return steps_.load(std::memory_order_relaxed);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, std::map<std::uint64_t, std::uint64_t>>
      states_;
  std::atomic<std::uint64_t> steps_{0};
};

// Uses a process-wide GoldenCache.
std::uint64_t golden_value(const PrngSpec& spec);

}  // namespace gbx

#endif  // GBX_PRNG_HPP_
