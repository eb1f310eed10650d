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

#ifndef GBX_WORKLOAD_HPP_
#define GBX_WORKLOAD_HPP_

#include <cstdint>
#include <string>

#include "gbx/guardband.hpp"
#include "gbx/prng.hpp"

namespace gbx {

// Cycle-count stand-in for the eight-core Experiment B application.
struct ParallelWorkloadSpec {
  int n_cores = 8;
  std::uint64_t total_cycles = 0;
  std::string name = "parallel";

  void validate() const;

  friend bool operator==(const ParallelWorkloadSpec&,
                         const ParallelWorkloadSpec&) = default;
};

inline constexpr double kDefaultCyclesPerItem = GBX_DEFAULT_CYCLES_PER_ITEM;

double workload_cycles(const PrngSpec& spec, double cycles_per_item);

// Seconds: N * cycles_per_item / f.
double workload_duration(const PrngSpec& spec, const OperatingPoint& op,
                         double cycles_per_item);
// Seconds: total_cycles / f.
double workload_duration(const ParallelWorkloadSpec& spec,
                         const OperatingPoint& op);

}  // namespace gbx

#endif  // GBX_WORKLOAD_HPP_
