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

#ifndef GBX_CLI_COMMANDS_HPP_
#define GBX_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gbx/cli/config.hpp"

namespace gbx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

std::string_view tool_version() noexcept;

struct RunContext {
  CampaignConfig config;
  unsigned workers = 0;
  std::filesystem::path out_dir;
  std::ostream* out = nullptr;
};

// "gbx <version> config=<hash> seed=<seed>"
std::string provenance(const CampaignConfig& config);

// Model parameters: explicit ones from the config, otherwise calibrated.
DeviceModelParams resolve_params(const CampaignConfig& config);

void cmd_calibrate(const RunContext& ctx);
void cmd_characterize(const RunContext& ctx);
void cmd_energy(const RunContext& ctx);
void cmd_control(const RunContext& ctx, std::optional<std::size_t> episodes);
void cmd_report(const RunContext& ctx);

// Parses argv and dispatches; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace gbx::cli

#endif  // GBX_CLI_COMMANDS_HPP_
