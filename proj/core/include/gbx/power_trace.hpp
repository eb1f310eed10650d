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

#ifndef GBX_POWER_TRACE_HPP_
#define GBX_POWER_TRACE_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace gbx {

// One shunt-monitor reading. bus_mv may be NaN when the monitor only
// reports current; the supply setting is used instead.
struct PowerSample {
  std::int64_t timestamp_us;
  double current_ma;
  double bus_mv;
};

// Samples plus GPIO trigger markers. trigger_start is the index of the
// first sample after the START marker; trigger_end is one past the last
// sample before the END marker.
struct PowerTrace {
  std::vector<PowerSample> samples;
  std::optional<std::size_t> trigger_start;
  std::optional<std::size_t> trigger_end;
};

// CSV with header "timestamp_us,current_ma,bus_mv" and marker rows
// "TRIG,START" / "TRIG,END". Throws Error(kMalformedTrace) with the line
// number on malformed input.
PowerTrace read_power_trace_csv(std::istream& in);
void write_power_trace_csv(std::ostream& out, const PowerTrace& trace);

// Trapezoidal average power over a window; accepts samples incrementally
// so a trace can be ingested in arbitrary chunks.
class PowerWindowIntegrator {
 public:
  explicit PowerWindowIntegrator(double supply_mv) : supply_mv_(supply_mv) {}

  // Throws Error(kNonMonotonicTimestamps).
  void add(const PowerSample& sample);

  std::size_t samples() const noexcept { return count_; }
  double energy_j() const noexcept { return energy_j_; }
  // Throws Error(kEmptyWindow) with fewer than two samples.
  double average_w() const;

 private:
  double watts(const PowerSample& s) const;

  double supply_mv_;
  std::size_t count_ = 0;
  std::int64_t first_us_ = 0;
  std::int64_t last_us_ = 0;
  double last_w_ = 0.0;
  double energy_j_ = 0.0;
};

// Average watts over the trigger window. Throws Error(kEmptyWindow) when
// the window is missing or holds fewer than two samples, and
// Error(kNonMonotonicTimestamps) when timestamps do not strictly increase.
double ingest_power_trace(const PowerTrace& trace, double shunt_supply_mv);

}  // namespace gbx

#endif  // GBX_POWER_TRACE_HPP_
