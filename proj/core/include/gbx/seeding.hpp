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

#ifndef GBX_SEEDING_HPP_
#define GBX_SEEDING_HPP_

#include <cstdint>
#include <random>

namespace gbx {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Per-run seed; depends only on the run's coordinates, never on the order
// in which runs are scheduled.
std::uint64_t derive_run_seed(std::uint64_t campaign_seed, int voltage_mv,
                              std::int64_t freq_khz, std::uint64_t n_items,
                              std::uint64_t repetition) noexcept;

// Uniform doubles in [0, 1) with a portable bit recipe (the standard
// distributions are implementation-defined).
class UnitStream {
 public:
  explicit UnitStream(std::uint64_t seed) : engine_(seed) {}

  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace gbx

#endif  // GBX_SEEDING_HPP_
