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

#include "gbx/seeding.hpp"

namespace gbx {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_run_seed(std::uint64_t campaign_seed, int voltage_mv,
                              std::int64_t freq_khz, std::uint64_t n_items,
                              std::uint64_t repetition) noexcept {
  std::uint64_t h = splitmix64(campaign_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(voltage_mv));
  h = splitmix64(h ^ static_cast<std::uint64_t>(freq_khz));
  h = splitmix64(h ^ n_items);
  h = splitmix64(h ^ repetition);
  return h;
}

std::uint64_t UnitStream::below(std::uint64_t bound) {
  // Rejection sampling keeps the result unbiased and portable.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

}  // namespace gbx
