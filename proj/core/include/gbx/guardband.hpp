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

#ifndef GBX_GUARDBAND_HPP_
#define GBX_GUARDBAND_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace gbx {

// Supply steps reachable by the on-board DC-DC converter.
inline constexpr std::array<int, 5> kSupplyStepsMv{1000, 1050, 1100, 1150, 1200};
inline constexpr int kSupplyStepMv = 50;
inline constexpr int kMinSupplyMv = 1000;
inline constexpr int kMaxSupplyMv = 1200;

bool is_supply_step(int voltage_mv) noexcept;

enum class ClockDomain { kFabricController, kCluster };

std::string_view to_string(ClockDomain domain) noexcept;

// A (voltage, frequency, clock domain) triple. Frequencies are integral kHz
// so the 2 MHz sweep grid is exact.
class OperatingPoint {
 public:
  // Throws Error(kUnsupportedVoltage) or Error(kInvalidArgument).
  OperatingPoint(int voltage_mv, std::int64_t freq_khz,
                 ClockDomain domain = ClockDomain::kCluster);

  int voltage_mv() const noexcept { return voltage_mv_; }
  std::int64_t freq_khz() const noexcept { return freq_khz_; }
  ClockDomain domain() const noexcept { return domain_; }

  double voltage_v() const noexcept { return voltage_mv_ / 1000.0; }
  double freq_hz() const noexcept { return static_cast<double>(freq_khz_) * 1e3; }

  friend bool operator==(const OperatingPoint&, const OperatingPoint&) = default;

 private:
  int voltage_mv_;
  std::int64_t freq_khz_;
  ClockDomain domain_;
};

struct GuardbandRow {
  int voltage_mv;
  std::int64_t fc_max_khz;
  std::int64_t cluster_max_khz;

  friend bool operator==(const GuardbandRow&, const GuardbandRow&) = default;
};

// Datasheet voltage/frequency envelope. Rows are kept ordered from the
// highest voltage down; both frequency columns increase with voltage.
class GuardbandTable {
 public:
  // Throws Error(kInvalidArgument) when the rows break the table invariants.
  explicit GuardbandTable(std::vector<GuardbandRow> rows);

  // GAP8 datasheet values.
  static const GuardbandTable& gap8();

  std::span<const GuardbandRow> rows() const noexcept { return rows_; }

  // Throws Error(kUnsupportedVoltage) for voltages not in the table.
  std::int64_t max_freq_khz(int voltage_mv, ClockDomain domain) const;
  bool within(const OperatingPoint& op) const;

  // Lowest table voltage whose limit admits freq_khz, if any.
  std::optional<int> lowest_voltage_for(std::int64_t freq_khz,
                                        ClockDomain domain) const;

 private:
  std::vector<GuardbandRow> rows_;
};

std::int64_t guardband_max_freq(const GuardbandTable& table, int voltage_mv,
                                ClockDomain domain);
bool within_guardband(const GuardbandTable& table, const OperatingPoint& op);

}  // namespace gbx

#endif  // GBX_GUARDBAND_HPP_
