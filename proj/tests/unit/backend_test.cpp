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

#include "gbx/backend.hpp"

#include <gtest/gtest.h>

#include "gbx/calibration.hpp"
#include "gbx/error.hpp"

namespace gbx {
namespace {

const DeviceModelParams& calibrated() { return default_calibrated_params(); }

TEST(RunRequest, TimeoutIsThreeTimesDuration) {
  const auto req = make_run_request(OperatingPoint(1000, 200'000),
                                    PrngSpec{1, 50'000}, 140);
  EXPECT_NEAR(req.timeout_s, 0.105, 1e-15);
  EXPECT_THROW(make_run_request(OperatingPoint(1000, 200'000), PrngSpec{1, 1},
                                140, 1.0),
               Error);
}

TEST(SimulatedRun, GuardbandPointReturnsGolden) {
  const auto req = make_run_request(OperatingPoint(1000, 87'000),
                                    PrngSpec{1, 50'000}, 140);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = simulated_run(calibrated(), req, seed);
    ASSERT_EQ(r.status, RunStatus::kValue);
    EXPECT_EQ(r.value, golden_value(req.spec));
    EXPECT_DOUBLE_EQ(r.elapsed_s, 50'000 * 140 / 87e6);
    EXPECT_DOUBLE_EQ(r.avg_power_w,
                     power(calibrated(), req.op, kSingleCoreRunCores));
  }
}

TEST(SimulatedRun, ForcedLockupTimesOut) {
  DeviceModelParams p = calibrated();
  p.k_lock = 1e-9;  // lockup onset far below any frequency
  const auto req = make_run_request(OperatingPoint(1100, 200'000),
                                    PrngSpec{1, 50'000}, 140);
  const auto r = simulated_run(p, req, 17);
  EXPECT_TRUE(r.timed_out());
  EXPECT_DOUBLE_EQ(r.elapsed_s, req.timeout_s);
}

TEST(SimulatedRun, ForcedErrorIsACorruption) {
  DeviceModelParams p = calibrated();
  p.k_err = 1e-9;
  const auto req = make_run_request(OperatingPoint(1100, 200'000),
                                    PrngSpec{3, 1000}, 140);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = simulated_run(p, req, seed);
    ASSERT_EQ(r.status, RunStatus::kValue);
    EXPECT_NE(r.value, golden_value(req.spec));
  }
}

TEST(SimulatedRun, PureFunctionOfInputs) {
  const auto req = make_run_request(OperatingPoint(1000, 218'000),
                                    PrngSpec{1, 50'000}, 140);
  GoldenCache cache;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    EXPECT_EQ(simulated_run(calibrated(), req, seed),
              simulated_run(calibrated(), req, seed, cache));
  }
}

TEST(SimulatedBackend, ParallelRunUsesNineCores) {
  SimulatedBackend backend(calibrated());
  const ParallelWorkloadSpec w{8, 10'000'000, "p"};
  const auto req = make_parallel_request(OperatingPoint(1000, 100'000), w);
  const auto r = backend.run_parallel(req, 1);
  EXPECT_TRUE(r.error_free);
  EXPECT_DOUBLE_EQ(r.elapsed_s, 0.1);
  EXPECT_DOUBLE_EQ(r.avg_power_w, power(calibrated(), req.op, 9));
}

TEST(Backend, DefaultParallelRunIsUnsupported) {
  struct Minimal final : Backend {
    RunResponse run(const RunRequest&, std::uint64_t) override { return {}; }
    bool concurrent() const noexcept override { return false; }
    double cycles_per_item() const noexcept override { return 140; }
  } minimal;
  try {
    minimal.run_parallel(
        make_parallel_request(OperatingPoint(1000, 100'000), {8, 10, "p"}), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendFailure);
  }
}

}  // namespace
}  // namespace gbx
