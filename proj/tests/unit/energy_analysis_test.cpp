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

#include "gbx/energy_analysis.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "gbx/calibration.hpp"
#include "gbx/error.hpp"
#include "support/fake_backends.hpp"

namespace gbx {
namespace {

using fakes::Verdict;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no gbx::Error thrown";
  return ErrorCode::kConfigError;
}

const std::vector<int> kAllVoltages{kSupplyStepsMv.begin(), kSupplyStepsMv.end()};

std::vector<EnergyRecord> default_grid(const DeviceModelParams& p,
                                       unsigned workers = 0) {
  SimulatedBackend backend(p);
  return energy_sweep(backend, default_energy_workload(), kAllVoltages,
                      default_energy_freqs(), 1, {workers});
}

EnergyRecord rec(int mv, std::int64_t khz, double joules, bool ok = true) {
  return {OperatingPoint(mv, khz), 1.0, joules, joules, ok};
}

TEST(EnergySweep, DefaultGridShapeAndInvariants) {
  const auto records = default_grid(default_calibrated_params());
  ASSERT_EQ(records.size(), 5u * 61);
  EXPECT_EQ(default_energy_freqs().front(), 80'000);
  EXPECT_EQ(default_energy_freqs().back(), 200'000);
  EXPECT_EQ(records.front().op, OperatingPoint(1000, 80'000));
  EXPECT_EQ(records.back().op, OperatingPoint(1200, 200'000));
  for (const auto& r : records) {
    EXPECT_DOUBLE_EQ(r.energy_j, r.avg_power_w * r.elapsed_s);
    EXPECT_DOUBLE_EQ(r.avg_power_w, power(default_calibrated_params(), r.op, 9));
    EXPECT_TRUE(r.error_free);
  }
  EXPECT_TRUE(energy_monotonicity_violations(records).empty());
}

TEST(EnergySweep, PureDynamicVoltageRatio) {
  DeviceModelParams p = default_calibrated_params();
  p.p_static_coeff = 0.0;
  const auto records = default_grid(p);
  for (std::size_t i = 0; i < 61; ++i) {
    const auto& low = records[i];
    const auto& high = records[4 * 61 + i];
    ASSERT_EQ(low.op.freq_khz(), high.op.freq_khz());
    EXPECT_NEAR(high.energy_j / low.energy_j, 1.44, 1e-12);
  }
}

TEST(EnergySweep, WorkerCountDoesNotChangeOutput) {
  std::ostringstream a, b;
  write_energy_csv(a, default_grid(default_calibrated_params(), 1));
  write_energy_csv(b, default_grid(default_calibrated_params(), 4));
  EXPECT_EQ(a.str(), b.str());
}

TEST(EnergySweep, EmptyGrid) {
  SimulatedBackend backend(default_calibrated_params());
  EXPECT_EQ(code_of([&] {
              energy_sweep(backend, default_energy_workload(), {},
                           default_energy_freqs(), 1);
            }),
            ErrorCode::kEmptyPlan);
}

TEST(Savings, CalibratedDefaultIsTwentySevenPercent) {
  const auto report =
      iso_performance_savings(default_grid(default_calibrated_params()),
                              GuardbandTable::gap8());
  EXPECT_NEAR(report.best.savings, 0.27, 0.005);
  EXPECT_EQ(report.best.freq_khz, 170'000);
  EXPECT_EQ(report.best.baseline_mv, 1200);
  EXPECT_EQ(report.best.candidate_mv, 1000);
  for (const auto& s : report.per_freq) {
    EXPECT_GE(s.savings, 0.0);
    EXPECT_LT(s.savings, 1.0);
  }
}

TEST(Savings, HandBuiltFixture) {
  const std::vector<EnergyRecord> records{
      rec(1200, 170'000, 1.0), rec(1000, 170'000, 0.8),
      rec(1200, 100'000, 0.5), rec(1000, 100'000, 0.45)};
  const auto report = iso_performance_savings(records, GuardbandTable::gap8());
  EXPECT_NEAR(report.best.savings, 0.2, 1e-12);
  EXPECT_EQ(report.best.freq_khz, 170'000);
  ASSERT_EQ(report.per_freq.size(), 2u);
  EXPECT_NEAR(report.per_freq[0].savings, 0.1, 1e-12);
}

TEST(Savings, IdentityWhenGuardbandNeverViolated) {
  std::vector<EnergyRecord> records;
  for (int v : kAllVoltages) {
    for (std::int64_t f = 40'000; f <= 86'000; f += 2'000) {
      records.push_back(rec(v, f, static_cast<double>(v) / static_cast<double>(f)));
    }
  }
  const auto report = iso_performance_savings(records, GuardbandTable::gap8());
  EXPECT_EQ(report.best.savings, 0.0);
  EXPECT_EQ(report.best.baseline_mv, report.best.candidate_mv);
}

TEST(Savings, ErroredRecordsAreNotCandidates) {
  const std::vector<EnergyRecord> records{rec(1200, 170'000, 1.0),
                                          rec(1000, 170'000, 0.8, false)};
  EXPECT_EQ(iso_performance_savings(records, GuardbandTable::gap8()).best.savings,
            0.0);
}

TEST(Savings, NoCommonFrequency) {
  const std::vector<EnergyRecord> records{rec(1000, 190'000, 1.0),
                                          rec(1200, 180'000, 1.0)};
  EXPECT_EQ(code_of([&] { iso_performance_savings(records, GuardbandTable::gap8()); }),
            ErrorCode::kNoCommonFrequency);
}

TEST(ErrorFreeMax, BoundedByFirstFailure) {
  std::vector<EnergyRecord> all_ok, planted;
  for (std::int64_t f = 80'000; f <= 200'000; f += 2'000) {
    all_ok.push_back(rec(1100, f, 1.0));
    planted.push_back(rec(1100, f, 1.0, f != 160'000));
  }
  EXPECT_EQ(error_free_max_freq(all_ok, 1100), 200'000);
  EXPECT_EQ(error_free_max_freq(planted, 1100), 158'000);
  EXPECT_EQ(code_of([&] { error_free_max_freq(all_ok, 1000); }),
            ErrorCode::kNoRecords);
  EXPECT_EQ(error_free_max_freq(default_grid(default_calibrated_params()), 1000),
            200'000);
}

TEST(ErrorFreeMax, ScriptedFailuresAboveOnset) {
  fakes::ScriptedBackend backend([](const RunRequest& req) {
    return req.op.freq_khz() >= 190'000 ? Verdict::kError : Verdict::kCorrect;
  });
  const std::vector<int> v{1000};
  const auto records = energy_sweep(backend, default_energy_workload(), v,
                                    default_energy_freqs(), 1);
  EXPECT_EQ(error_free_max_freq(records, 1000), 188'000);
}

TEST(Monotonicity, FlagsViolations) {
  const std::vector<EnergyRecord> records{
      rec(1000, 100'000, 1.0), rec(1000, 102'000, 1.1),
      rec(1050, 100'000, 0.9)};
  const auto v = energy_monotonicity_violations(records);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_TRUE(v[0].along_frequency);
  EXPECT_FALSE(v[1].along_frequency);
}

TEST(EnergyCsv, RoundTripAndHeader) {
  const auto records = default_grid(default_calibrated_params());
  std::ostringstream out;
  write_energy_csv(out, records, "gbx prov");
  EXPECT_EQ(out.str().rfind(
                "# gbx prov\n"
                "voltage_mv,freq_khz,elapsed_s,avg_power_w,energy_j,error_free\n",
                0),
            0u);
  std::istringstream in(out.str());
  EXPECT_EQ(read_energy_csv(in), records);
}

}  // namespace
}  // namespace gbx
