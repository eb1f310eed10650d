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

#ifndef GBX_DEVICE_MODEL_HPP_
#define GBX_DEVICE_MODEL_HPP_

#include <optional>

#include "gbx/guardband.hpp"

namespace gbx {

// Optional converter-droop hook: supply steps at or above from_mv deliver
// offset_mv less to the core. Ships disabled.
struct SupplyOffset {
  int from_mv = 1150;
  double offset_mv = 0.0;
  friend bool operator==(const SupplyOffset&, const SupplyOffset&) = default;
};

// Parameters of the alpha-power critical-frequency model, the logistic
// failure model around it, and the CV^2f + static power model.
//
//   f_err_onset(V)  = k_err  * (V - v_th)^alpha / V               [kHz, V in mV]
//   f_lock_onset(V) = k_lock * (V - v_th)^alpha / V + delta(V)
//   delta(V)        = lock_offset_slope * (crossover_mv - V)
//   P               = c_eff * n * V^2 * f + p_static_coeff * V     [W, V in volts, f in Hz]
struct DeviceModelParams {
  double v_th_mv = 0.0;
  double alpha = 1.0;
  double k_err = 0.0;
  double k_lock = 0.0;
  double w_err_khz = 500.0;
  double w_lock_khz = 1500.0;
  double crossover_mv = 1175.0;
  double lock_offset_slope_khz_per_mv = 0.0;
  double c_eff = 2.5e-11;
  double p_static_coeff = 0.0;
  double cycles_per_item = 140.0;
  std::optional<SupplyOffset> supply_offset;

  // Throws Error(kInvalidArgument) naming the offending field.
  void validate() const;

  friend bool operator==(const DeviceModelParams&,
                         const DeviceModelParams&) = default;
};

struct OnsetFrequencies {
  double error_khz;
  double lockup_khz;
};

struct OutcomeProbabilities {
  double p_error;
  double p_lockup;
};

// Numerically stable 1 / (1 + exp(-x)).
double logistic(double x) noexcept;

// Voltage the core actually sees after the optional supply offset.
double effective_voltage_mv(const DeviceModelParams& params, double voltage_mv);

double lockup_offset_khz(const DeviceModelParams& params, double voltage_mv);

// Throws Error(kDegenerateVoltage) when voltage_mv <= v_th_mv.
OnsetFrequencies onset_frequencies(const DeviceModelParams& params,
                                   double voltage_mv);

// Per-run probabilities; a function of (V, f) only.
OutcomeProbabilities outcome_probabilities(const DeviceModelParams& params,
                                           const OperatingPoint& op);

inline constexpr int kMaxActiveCores = 9;  // 8 cluster cores + FC

// Average power in watts. Throws Error(kInvalidCoreCount) outside [1, 9].
double power(const DeviceModelParams& params, const OperatingPoint& op,
             int n_active_cores);

// Joules. Throws Error(kInvalidArgument) on negative inputs.
double energy(double avg_power_w, double elapsed_s);

}  // namespace gbx

#endif  // GBX_DEVICE_MODEL_HPP_
