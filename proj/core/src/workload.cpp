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

#include "gbx/workload.hpp"

#include "gbx/error.hpp"

namespace gbx {

void ParallelWorkloadSpec::validate() const {
  if (n_cores < 1 || n_cores > 8) {
    throw Error(ErrorCode::kInvalidArgument,
                "parallel workload cores must lie in [1, 8]");
  }
  if (total_cycles == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "parallel workload needs a positive cycle count");
  }
}

double workload_cycles(const PrngSpec& spec, double cycles_per_item) {
  if (!(cycles_per_item > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cycles_per_item must be positive");
  }
  return static_cast<double>(spec.n_items) * cycles_per_item;
}

double workload_duration(const PrngSpec& spec, const OperatingPoint& op,
                         double cycles_per_item) {
  spec.validate();
  return workload_cycles(spec, cycles_per_item) / op.freq_hz();
}

double workload_duration(const ParallelWorkloadSpec& spec,
                         const OperatingPoint& op) {
  spec.validate();
  return static_cast<double>(spec.total_cycles) / op.freq_hz();
}

}  // namespace gbx
