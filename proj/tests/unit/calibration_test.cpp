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

#include "gbx/calibration.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "gbx/error.hpp"
#include "support/oracles.hpp"

namespace gbx {
namespace {

CalibrationResult run_default() {
  return calibrate(GuardbandTable::gap8(), CalibrationTargets{});
}

TEST(Calibrate, OnsetsTrackHeadroomTargets) {
  const auto r = run_default();
  ASSERT_EQ(r.onsets.size(), 5u);
  const CalibrationTargets t;
  const auto table = GuardbandTable::gap8();
  for (const auto& o : r.onsets) {
    const double mult =
        2.5 + (2.0 - 2.5) * (o.voltage_mv - 1000) / 200.0;  // linear in V
    const double target =
        mult * static_cast<double>(
                   table.max_freq_khz(o.voltage_mv, ClockDomain::kCluster));
    EXPECT_NEAR(o.target_khz, target, 1e-6);
    EXPECT_NEAR(t.multiplier(o.voltage_mv), mult, 1e-12);
    EXPECT_LE(std::abs(o.error_khz - target) / target, 0.01) << o.voltage_mv;
    EXPECT_NEAR(o.error_khz, onset_frequencies(r.params, o.voltage_mv).error_khz,
                1e-9);
  }
  EXPECT_LE(r.max_rel_error, 0.01);
  EXPECT_NEAR(onset_frequencies(r.params, 1000).error_khz, 217'500, 2'175);
}

TEST(Calibrate, LockupOffsetChangesSignAtCrossover) {
  const auto r = run_default();
  EXPECT_GT(lockup_offset_khz(r.params, 1000), 0.0);
  EXPECT_GT(lockup_offset_khz(r.params, 1150), 0.0);
  EXPECT_LT(lockup_offset_khz(r.params, 1200), 0.0);
  EXPECT_NEAR(lockup_offset_khz(r.params, r.params.crossover_mv), 0.0, 1e-9);
  EXPECT_NEAR(lockup_offset_khz(r.params, 1000), 12'000, 1e-6);
}

TEST(Calibrate, StaticCoefficientMatchesClosedForm) {
  const auto r = run_default();
  const double expected =
      oracle::static_coeff_for_savings(0.27, 2.5e-11, 9, 170e6, 1.2, 1.0);
  EXPECT_NEAR(r.params.p_static_coeff, expected, 1e-12);
  EXPECT_NEAR(r.params.p_static_coeff / (2.5e-11 * 9 * 170e6), 0.4129, 5e-5);

  const double base = power(r.params, OperatingPoint(1200, 170'000), 9);
  const double cand = power(r.params, OperatingPoint(1000, 170'000), 9);
  EXPECT_NEAR(1.0 - cand / base, 0.27, 0.005);
  EXPECT_EQ(r.savings_baseline_mv, 1200);
  EXPECT_EQ(r.savings_candidate_mv, 1000);
  EXPECT_NEAR(r.reference_savings, 0.27, 1e-9);
}

TEST(Calibrate, PureDynamicLimitDrivesStaticToZero) {
  CalibrationTargets t;
  t.savings_target = 1.0 - (1.0 / 1.2) * (1.0 / 1.2);
  const auto r = calibrate(GuardbandTable::gap8(), t);
  EXPECT_NEAR(r.params.p_static_coeff, 0.0, 1e-12);
}

TEST(Calibrate, ReferencePowerRecorded) {
  const auto r = run_default();
  EXPECT_DOUBLE_EQ(r.reference_power_w,
                   power(r.params, OperatingPoint(1000, 200'000), 8));
  EXPECT_NEAR(r.reference_power_w,
              oracle::power_w(2.5e-11, 8, 1000, 200'000, r.params.p_static_coeff),
              1e-15);
}

TEST(Calibrate, ImpossibleFitDiverges) {
  CalibrationTargets t;
  t.tolerance = 1e-6;
  try {
    calibrate(GuardbandTable::gap8(), t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCalibrationDiverged);
  }
}

TEST(Calibrate, SavingsAboveDynamicLimitIsUnreachable) {
  CalibrationTargets t;
  t.savings_target = 0.35;
  EXPECT_THROW(calibrate(GuardbandTable::gap8(), t), Error);
}

TEST(Calibrate, InvalidTargets) {
  CalibrationTargets t;
  t.multiplier_at_min_mv = -1.0;
  try {
    calibrate(GuardbandTable::gap8(), t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Calibrate, DefaultParamsAreMemoizedCalibration) {
  EXPECT_EQ(default_calibrated_params(), run_default().params);
  EXPECT_EQ(&default_calibrated_params(), &default_calibrated_params());
}

TEST(CalibrationReport, RoundTripsAndIsDeterministic) {
  const auto r = run_default();
  std::ostringstream a, b;
  write_calibration_report(a, r);
  write_calibration_report(b, run_default());
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in("# provenance line\n" + a.str());
  EXPECT_EQ(read_params_report(in), r.params);
  EXPECT_NE(a.str().find("power.w_at_1000mv_200mhz_8cores"), std::string::npos);
}

TEST(CalibrationReport, MissingKeyIsConfigError) {
  std::istringstream in("model.alpha = 1\n");
  try {
    read_params_report(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
}

}  // namespace
}  // namespace gbx
