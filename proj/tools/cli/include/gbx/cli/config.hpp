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

#ifndef GBX_CLI_CONFIG_HPP_
#define GBX_CLI_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gbx/avs_controller.hpp"
#include "gbx/calibration.hpp"
#include "gbx/device_model.hpp"
#include "gbx/guardband.hpp"
#include "gbx/sweep.hpp"
#include "gbx/workload.hpp"

namespace gbx::cli {

struct EnergyGrid {
  std::vector<int> voltages_mv{kSupplyStepsMv.begin(), kSupplyStepsMv.end()};
  std::vector<std::int64_t> freqs_khz;
  ParallelWorkloadSpec workload;
};

struct ControlCampaign {
  ControllerConfig controller;
  std::size_t episodes = 100;
  int windows = kDefaultEpisodeWindows;
};

struct CampaignConfig {
  GuardbandTable guardband = GuardbandTable::gap8();
  CalibrationTargets targets;
  // Explicit model parameters bypass calibration.
  std::optional<DeviceModelParams> model;
  SweepPlan sweep;
  EnergyGrid energy;
  ControlCampaign control;
  std::uint64_t campaign_seed = 1;
  std::filesystem::path output_dir = "gbx-out";
  // FNV-1a over the canonical form of this configuration.
  std::uint64_t hash = 0;
};

CampaignConfig default_config();

// Throws Error(kConfigError) whose message starts with the offending field
// path, e.g. "sweep.stop_rule.ceiling_khz: expected an integer".
CampaignConfig parse_config(std::string_view json_text,
                            const std::filesystem::path& base_dir = {});
CampaignConfig load_config(const std::filesystem::path& path);

// Canonical JSON for a configuration; parse_config accepts it back.
std::string dump_config(const CampaignConfig& config);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace gbx::cli

#endif  // GBX_CLI_CONFIG_HPP_
