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

#ifndef GBX_AVS_CONTROLLER_HPP_
#define GBX_AVS_CONTROLLER_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gbx/backend.hpp"
#include "gbx/device_model.hpp"
#include "gbx/guardband.hpp"

namespace gbx {

// Two lockstep cores plus the fabric controller.
inline constexpr int kLockstepActiveCores = 3;
inline constexpr int kDefaultEpisodeWindows = 30;

struct ControllerConfig {
  std::int64_t target_freq_khz = 170'000;
  int window_runs = 200;
  double rate_lo = 0.001;
  double rate_hi = 0.01;
  // Extra cycles per errored run; unset means two runs' worth of cycles.
  std::optional<double> recovery_cost_cycles;
  int settle_windows = 3;
  std::uint64_t run_items = 50'000;
  int active_cores = kLockstepActiveCores;
  // Required distance between the target and a step's lockup onset.
  std::int64_t safety_margin_khz = 10'000;
  double timeout_factor = kDefaultTimeoutFactor;

  // Throws Error(kInvalidArgument) naming the offending field.
  void validate() const;
  double run_cycles(double cycles_per_item) const;
  double recovery_cycles(double cycles_per_item) const;

  friend bool operator==(const ControllerConfig&,
                         const ControllerConfig&) = default;
};

enum class ControllerStatus { kSeeking, kSettled, kSafetyHold };
enum class ControlAction { kStepDown, kStepUp, kHold };

std::string_view to_string(ControllerStatus status) noexcept;
std::string_view to_string(ControlAction action) noexcept;

struct ControllerState {
  int voltage_mv = kMaxSupplyMv;
  // Allowed range of supply steps.
  int min_mv = kMinSupplyMv;
  int max_mv = kMaxSupplyMv;
  std::size_t window_errors = 0;
  std::size_t windows_elapsed = 0;
  ControllerStatus status = ControllerStatus::kSeeking;
  int consecutive_holds = 0;
  int safety_windows_left = 0;

  friend bool operator==(const ControllerState&,
                         const ControllerState&) = default;
};

struct ControlDecision {
  ControllerState state;
  ControlAction action;
  double rate;
};

// Decision for one completed window of config.window_runs runs.
ControlDecision controller_step(const ControllerState& state,
                                const ControllerConfig& config,
                                std::size_t window_error_count,
                                std::size_t window_lockups = 0);

struct WindowTrace {
  std::size_t window;
  int voltage_mv;
  std::size_t errors;
  std::size_t lockups;
  double rate;
  ControlAction action;
  ControllerStatus status;  // after the decision
  double useful_cycles;
  double recovery_cycles;
  double duration_s;
  double power_w;
  double energy_j;
};

struct EpisodeReport {
  std::uint64_t seed = 0;
  double energy_j = 0.0;
  double useful_cycles = 0.0;
  double recovery_cycles = 0.0;
  double overhead = 0.0;  // recovery / (useful + recovery)
  std::size_t lockup_events = 0;
  ControllerState final_state;
  std::optional<std::size_t> settled_after_windows;
  // Over windows run while Settled.
  std::optional<double> steady_state_rate;
  std::optional<double> steady_state_savings;
  int baseline_mv = kMaxSupplyMv;
  bool no_guardband_baseline = false;
  double baseline_energy_j = 0.0;
  double net_savings = 0.0;
  std::vector<WindowTrace> trace;
};

// Lowest supply step whose lockup onset clears the target by the safety
// margin. Throws Error(kInfeasibleTarget) if there is none.
int lowest_safe_voltage(const DeviceModelParams& params,
                        const ControllerConfig& config);

// Simulates one feedback episode starting from the guardband voltage for
// the target frequency, or the highest step when no guardband admits it.
EpisodeReport run_episode(const DeviceModelParams& params,
                          const ControllerConfig& config,
                          const GuardbandTable& table,
                          std::uint64_t episode_seed,
                          int duration_windows = kDefaultEpisodeWindows);

std::uint64_t episode_seed(std::uint64_t campaign_seed, std::uint64_t index);

// Independent episodes, run concurrently, returned in index order.
std::vector<EpisodeReport> run_episodes(const DeviceModelParams& params,
                                        const ControllerConfig& config,
                                        const GuardbandTable& table,
                                        std::uint64_t campaign_seed,
                                        std::size_t count,
                                        int duration_windows,
                                        unsigned workers = 0);

void write_episode_trace_csv(std::ostream& out,
                             std::span<const EpisodeReport> reports,
                             std::string_view provenance = {});
void write_episode_summary_csv(std::ostream& out,
                               std::span<const EpisodeReport> reports,
                               std::string_view provenance = {});
void write_episode_digest(std::ostream& out,
                          std::span<const EpisodeReport> reports,
                          const ControllerConfig& config);

}  // namespace gbx

#endif  // GBX_AVS_CONTROLLER_HPP_
