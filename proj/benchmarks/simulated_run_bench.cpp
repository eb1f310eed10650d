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

#include <benchmark/benchmark.h>

#include "gbx/backend.hpp"
#include "gbx/calibration.hpp"

namespace {

void BM_SimulatedRun(benchmark::State& state) {
  gbx::SimulatedBackend backend(gbx::default_calibrated_params());
  const auto req = gbx::make_run_request(
      gbx::OperatingPoint(1000, 218'000),
      {0x9E3779B97F4A7C15ULL, static_cast<std::uint64_t>(state.range(0))},
      gbx::kDefaultCyclesPerItem);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(backend.run(req, seed++));
}
BENCHMARK(BM_SimulatedRun)->Arg(50'000)->Arg(1'000'000);

}  // namespace
