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

#ifndef GBX_CALIBRATION_HPP_
#define GBX_CALIBRATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gbx/device_model.hpp"
#include "gbx/guardband.hpp"

namespace gbx {

// Observed headroom anchors the device model is fitted to. The error-onset
// target at voltage V is multiplier(V) * cluster_guardband(V), with the
// multiplier interpolated linearly between the lowest and highest steps.
struct CalibrationTargets {
  double multiplier_at_min_mv = 2.5;
  double multiplier_at_max_mv = 2.0;
  // The fitted logistic midpoint sits this far above each target so the
  // first failing point of a 2 MHz sweep lands at or above the target.
  double onset_margin_khz = 1500.0;
  double crossover_mv = 1175.0;
  double lock_offset_at_min_khz = 12000.0;
  double w_err_khz = 500.0;
  double w_lock_khz = 1500.0;
  double savings_target = 0.27;
  std::int64_t reference_freq_khz = 170'000;
  int reference_cores = 9;
  double c_eff = 2.5e-11;
  double cycles_per_item = 140.0;
  double tolerance = 0.01;

  void validate() const;
  double multiplier(int voltage_mv) const;

  friend bool operator==(const CalibrationTargets&,
                         const CalibrationTargets&) = default;
};

struct OnsetFit {
  int voltage_mv;
  double target_khz;  // multiplier * cluster guardband
  double error_khz;   // fitted error-onset midpoint
  double lockup_khz;
  double rel_error;   // (error_khz - target_khz) / target_khz
};

struct CalibrationResult {
  DeviceModelParams params;
  std::vector<OnsetFit> onsets;
  double max_rel_error = 0.0;
  int savings_baseline_mv = 0;
  int savings_candidate_mv = 0;
  double reference_savings = 0.0;
  // 1.0 V, 200 MHz, 8 active cores; recorded for cross-checking backends.
  double reference_power_w = 0.0;
};

// Throws Error(kCalibrationDiverged) when the onset fit misses a target by
// more than targets.tolerance or the savings target has no non-negative
// static-power solution.
CalibrationResult calibrate(const GuardbandTable& table,
                            const CalibrationTargets& targets);

// calibrate(GAP8 table, default targets), computed once.
const DeviceModelParams& default_calibrated_params();

// Human-readable key = value report. read_params_report() recovers the
// model parameters from it.
void write_calibration_report(std::ostream& out, const CalibrationResult& r);
DeviceModelParams read_params_report(std::istream& in);

}  // namespace gbx

#endif  // GBX_CALIBRATION_HPP_
