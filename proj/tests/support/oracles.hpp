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

// Reference computations written independently of the library, used as
// test oracles.
#ifndef GBX_TESTS_SUPPORT_ORACLES_HPP_
#define GBX_TESTS_SUPPORT_ORACLES_HPP_

#include <cstdint>
#include <optional>
#include <vector>

namespace gbx::oracle {

struct BitFlip {
  std::uint64_t iteration;  // 1-based
  unsigned bit;
};

// xorshift64* written from the published description, one item at a time.
std::uint64_t xorshift_last(std::uint64_t seed, std::uint64_t n,
                            std::optional<BitFlip> flip = std::nullopt);

// f = k (V - Vth)^alpha / V, kHz.
double alpha_power_onset_khz(double k, double v_th_mv, double alpha,
                             double voltage_mv);

// Watts; V in millivolts, f in kHz.
double power_w(double c_eff, int cores, double voltage_mv, double freq_khz,
               double static_coeff);

// Static coefficient that makes 1 - P(Vc)/P(Vb) equal the savings target at
// equal frequency and core count.
double static_coeff_for_savings(double savings, double c_eff, int cores,
                                double freq_hz, double baseline_v,
                                double candidate_v);

// Exact integral of a piecewise-linear power curve divided by its span.
double piecewise_linear_mean(const std::vector<double>& t_s,
                             const std::vector<double>& w);

// Nearest-rank percentile by counting, no index arithmetic shortcuts.
std::int64_t nearest_rank(std::vector<std::int64_t> values, double pct);

// Ordinary least squares slope via the normal-equation sums.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gbx::oracle

#endif  // GBX_TESTS_SUPPORT_ORACLES_HPP_
