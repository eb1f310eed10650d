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

#include "gbx/guardband.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "gbx/error.hpp"

namespace gbx {

bool is_supply_step(int voltage_mv) noexcept {
  return std::find(kSupplyStepsMv.begin(), kSupplyStepsMv.end(), voltage_mv) !=
         kSupplyStepsMv.end();
}

std::string_view to_string(ClockDomain domain) noexcept {
  return domain == ClockDomain::kCluster ? "cluster" : "fc";
}

OperatingPoint::OperatingPoint(int voltage_mv, std::int64_t freq_khz,
                               ClockDomain domain)
    : voltage_mv_(voltage_mv), freq_khz_(freq_khz), domain_(domain) {
  if (!is_supply_step(voltage_mv)) {
    throw Error(ErrorCode::kUnsupportedVoltage,
                std::to_string(voltage_mv) + " mV is not a supply step");
  }
  if (freq_khz <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "frequency must be positive, got " + std::to_string(freq_khz) +
                    " kHz");
  }
}

GuardbandTable::GuardbandTable(std::vector<GuardbandRow> rows)
    : rows_(std::move(rows)) {
  std::sort(rows_.begin(), rows_.end(),
            [](const GuardbandRow& a, const GuardbandRow& b) {
              return a.voltage_mv > b.voltage_mv;
            });
  if (rows_.size() != kSupplyStepsMv.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "guardband table needs exactly 5 rows, got " +
                    std::to_string(rows_.size()));
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const int expected = kMaxSupplyMv - static_cast<int>(i) * kSupplyStepMv;
    if (rows_[i].voltage_mv != expected) {
      throw Error(ErrorCode::kInvalidArgument,
                  "guardband rows must cover 1200..1000 mV in 50 mV steps");
    }
    if (rows_[i].fc_max_khz <= 0 || rows_[i].cluster_max_khz <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "guardband frequencies must be positive");
    }
    if (i > 0 && (rows_[i].fc_max_khz >= rows_[i - 1].fc_max_khz ||
                  rows_[i].cluster_max_khz >= rows_[i - 1].cluster_max_khz)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "guardband frequencies must strictly increase with voltage");
    }
  }
}

const GuardbandTable& GuardbandTable::gap8() {
  static const GuardbandTable table({
      {1200, 250'000, 170'000},
      {1150, 225'000, 149'000},
      {1100, 200'000, 129'000},
      {1050, 175'000, 108'000},
      {1000, 150'000, 87'000},
  });
  return table;
}

std::int64_t GuardbandTable::max_freq_khz(int voltage_mv,
                                          ClockDomain domain) const {
  for (const auto& row : rows_) {
    if (row.voltage_mv == voltage_mv) {
      return domain == ClockDomain::kCluster ? row.cluster_max_khz
                                             : row.fc_max_khz;
    }
  }
  throw Error(ErrorCode::kUnsupportedVoltage,
              std::to_string(voltage_mv) + " mV is not a guardband table step");
}

bool GuardbandTable::within(const OperatingPoint& op) const {
  return op.freq_khz() <= max_freq_khz(op.voltage_mv(), op.domain());
}

std::optional<int> GuardbandTable::lowest_voltage_for(
    std::int64_t freq_khz, ClockDomain domain) const {
  for (auto it = rows_.rbegin(); it != rows_.rend(); ++it) {
    const auto limit =
        domain == ClockDomain::kCluster ? it->cluster_max_khz : it->fc_max_khz;
    if (freq_khz <= limit) return it->voltage_mv;
  }
  return std::nullopt;
}

std::int64_t guardband_max_freq(const GuardbandTable& table, int voltage_mv,
                                ClockDomain domain) {
  return table.max_freq_khz(voltage_mv, domain);
}

bool within_guardband(const GuardbandTable& table, const OperatingPoint& op) {
  return table.within(op);
}

}  // namespace gbx
