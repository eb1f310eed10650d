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

#include "gbx/device_model.hpp"

#include <cmath>
#include <string>

#include "gbx/error.hpp"

namespace gbx {
namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("device model field '") + field + "' " + rule);
  }
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void DeviceModelParams::validate() const {
  require(std::isfinite(v_th_mv) && v_th_mv < kMinSupplyMv, "v_th_mv",
          "must be below the lowest supply step");
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 2.0, "alpha",
          "must lie in (0, 2]");
  require(finite_positive(k_err), "k_err", "must be positive");
  require(finite_positive(k_lock), "k_lock", "must be positive");
  require(finite_positive(w_err_khz), "w_err_khz", "must be positive");
  require(finite_positive(w_lock_khz), "w_lock_khz", "must be positive");
  require(std::isfinite(crossover_mv), "crossover_mv", "must be finite");
  require(std::isfinite(lock_offset_slope_khz_per_mv) &&
              lock_offset_slope_khz_per_mv >= 0.0,
          "lock_offset_slope_khz_per_mv", "must be non-negative");
  require(finite_positive(c_eff), "c_eff", "must be positive");
  require(std::isfinite(p_static_coeff) && p_static_coeff >= 0.0,
          "p_static_coeff", "must be non-negative");
  require(finite_positive(cycles_per_item), "cycles_per_item",
          "must be positive");
  if (supply_offset) {
    require(std::isfinite(supply_offset->offset_mv) &&
                supply_offset->offset_mv >= 0.0,
            "supply_offset.offset_mv", "must be non-negative");
  }
}

double logistic(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double effective_voltage_mv(const DeviceModelParams& params,
                            double voltage_mv) {
  if (params.supply_offset && voltage_mv >= params.supply_offset->from_mv) {
    return voltage_mv - params.supply_offset->offset_mv;
  }
  return voltage_mv;
}

double lockup_offset_khz(const DeviceModelParams& params, double voltage_mv) {
  return params.lock_offset_slope_khz_per_mv *
         (params.crossover_mv - voltage_mv);
}

OnsetFrequencies onset_frequencies(const DeviceModelParams& params,
                                   double voltage_mv) {
  const double v = effective_voltage_mv(params, voltage_mv);
  if (!(v > params.v_th_mv)) {
    throw Error(ErrorCode::kDegenerateVoltage,
                "voltage " + std::to_string(voltage_mv) +
                    " mV is not above the threshold analog " +
                    std::to_string(params.v_th_mv) + " mV");
  }
  const double shape = std::pow(v - params.v_th_mv, params.alpha) / v;
  return {params.k_err * shape,
          params.k_lock * shape + lockup_offset_khz(params, v)};
}

OutcomeProbabilities outcome_probabilities(const DeviceModelParams& params,
                                           const OperatingPoint& op) {
  const auto onset = onset_frequencies(params, op.voltage_mv());
  const double f = static_cast<double>(op.freq_khz());
  return {logistic((f - onset.error_khz) / params.w_err_khz),
          logistic((f - onset.lockup_khz) / params.w_lock_khz)};
}

double power(const DeviceModelParams& params, const OperatingPoint& op,
             int n_active_cores) {
  if (n_active_cores < 1 || n_active_cores > kMaxActiveCores) {
    throw Error(ErrorCode::kInvalidCoreCount,
                "active cores must lie in [1, 9], got " +
                    std::to_string(n_active_cores));
  }
  const double v = effective_voltage_mv(params, op.voltage_mv()) / 1000.0;
  return params.c_eff * n_active_cores * v * v * op.freq_hz() +
         params.p_static_coeff * v;
}

double energy(double avg_power_w, double elapsed_s) {
  if (!(avg_power_w >= 0.0) || !(elapsed_s >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "power and elapsed time must be non-negative");
  }
  return avg_power_w * elapsed_s;
}

}  // namespace gbx
