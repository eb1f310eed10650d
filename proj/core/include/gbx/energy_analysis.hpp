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

#ifndef GBX_ENERGY_ANALYSIS_HPP_
#define GBX_ENERGY_ANALYSIS_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "gbx/backend.hpp"
#include "gbx/guardband.hpp"
#include "gbx/workload.hpp"

namespace gbx {

struct EnergyRecord {
  OperatingPoint op;
  double elapsed_s;
  double avg_power_w;
  double energy_j;
  bool error_free;

  friend bool operator==(const EnergyRecord&, const EnergyRecord&) = default;
};

// 80 to 200 MHz in 2 MHz steps.
std::vector<std::int64_t> default_energy_freqs();
// Eight cluster cores; the fabric controller adds a ninth active core.
ParallelWorkloadSpec default_energy_workload();

struct EnergySweepOptions {
  unsigned workers = 0;  // 0: hardware concurrency
  double timeout_factor = kDefaultTimeoutFactor;
};

// One record per (voltage, frequency), voltage-major, ascending frequency.
// Throws Error(kEmptyPlan) for an empty grid.
std::vector<EnergyRecord> energy_sweep(Backend& backend,
                                       const ParallelWorkloadSpec& workload,
                                       std::span<const int> voltages_mv,
                                       std::span<const std::int64_t> freqs_khz,
                                       std::uint64_t campaign_seed,
                                       const EnergySweepOptions& options = {});

struct FrequencySavings {
  std::int64_t freq_khz;
  int baseline_mv;
  int candidate_mv;
  double baseline_j;
  double candidate_j;
  double savings;
};

struct SavingsReport {
  std::vector<FrequencySavings> per_freq;  // ascending frequency
  FrequencySavings best;
};

// Throws Error(kNoCommonFrequency) when no frequency has both an
// in-guardband record and an error-free record.
SavingsReport iso_performance_savings(std::span<const EnergyRecord> records,
                                      const GuardbandTable& table);

// Highest frequency below the first failure at that voltage.
// Throws Error(kNoRecords) if the voltage has no records, and
// Error(kInsufficientData) if its lowest frequency already fails.
std::int64_t error_free_max_freq(std::span<const EnergyRecord> records,
                                 int voltage_mv);

struct MonotonicityViolation {
  EnergyRecord lower;
  EnergyRecord higher;
  bool along_frequency;  // otherwise along voltage
};

// Error-free records whose energy fails to fall with frequency at fixed
// voltage, or fails to rise with voltage at fixed frequency.
std::vector<MonotonicityViolation> energy_monotonicity_violations(
    std::span<const EnergyRecord> records);

void write_energy_csv(std::ostream& out, std::span<const EnergyRecord> records,
                      std::string_view provenance = {});
std::vector<EnergyRecord> read_energy_csv(std::istream& in);
void write_savings_report(std::ostream& out, const SavingsReport& report,
                          std::string_view provenance = {});

}  // namespace gbx

#endif  // GBX_ENERGY_ANALYSIS_HPP_
