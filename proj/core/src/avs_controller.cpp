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

#include "gbx/avs_controller.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <string>
#include <type_traits>

#include "gbx/csv.hpp"
#include "gbx/error.hpp"
#include "gbx/seeding.hpp"
#include "task_pool.hpp"

namespace gbx {

void ControllerConfig::validate() const {
  auto bad = [](const std::string& what) {
    return Error(ErrorCode::kInvalidArgument, "controller: " + what);
  };
  if (target_freq_khz <= 0) throw bad("target_freq_khz must be positive");
  if (window_runs < 10) throw bad("window_runs must be at least 10");
  if (!(rate_lo >= 0.0 && rate_lo < rate_hi && rate_hi < 1.0)) {
    throw bad("error rate bounds need 0 <= lo < hi < 1");
  }
  if (recovery_cost_cycles && !(*recovery_cost_cycles >= 0.0)) {
    throw bad("recovery_cost_cycles must be non-negative");
  }
  if (settle_windows < 1) throw bad("settle_windows must be at least 1");
  if (run_items == 0) throw bad("run_items must be positive");
  if (active_cores < 1 || active_cores > kMaxActiveCores) {
    throw bad("active_cores must lie in [1, 9]");
  }
  if (safety_margin_khz < 0) throw bad("safety_margin_khz must be non-negative");
  if (!(timeout_factor > 1.0)) throw bad("timeout_factor must exceed 1");
}

double ControllerConfig::run_cycles(double cycles_per_item) const {
  return static_cast<double>(run_items) * cycles_per_item;
}

double ControllerConfig::recovery_cycles(double cycles_per_item) const {
  return recovery_cost_cycles.value_or(2.0 * run_cycles(cycles_per_item));
}

std::string_view to_string(ControllerStatus status) noexcept {
  switch (status) {
    case ControllerStatus::kSeeking: return "seeking";
    case ControllerStatus::kSettled: return "settled";
    case ControllerStatus::kSafetyHold: return "safety_hold";
  }
  return "?";
}

std::string_view to_string(ControlAction action) noexcept {
  switch (action) {
    case ControlAction::kStepDown: return "step_down";
    case ControlAction::kStepUp: return "step_up";
    case ControlAction::kHold: return "hold";
  }
  return "?";
}

ControlDecision controller_step(const ControllerState& state,
                                const ControllerConfig& config,
                                std::size_t window_error_count,
                                std::size_t window_lockups) {
  ControllerState next = state;
  next.window_errors = window_error_count;
  ++next.windows_elapsed;
  const double rate = static_cast<double>(window_error_count) /
                      static_cast<double>(config.window_runs);

  const bool at_min = state.voltage_mv <= state.min_mv;
  const bool at_max = state.voltage_mv >= state.max_mv;
  ControlAction action = ControlAction::kHold;

  if (window_lockups > 0) {
    next.status = ControllerStatus::kSafetyHold;
    next.safety_windows_left = config.settle_windows;
    if (!at_max) action = ControlAction::kStepUp;
  } else {
    const bool holding = state.status == ControllerStatus::kSafetyHold;
    if (rate > config.rate_hi) {
      if (!at_max) action = ControlAction::kStepUp;
    } else if (rate < config.rate_lo && !at_min && !holding) {
      action = ControlAction::kStepDown;
    }
    if (holding && --next.safety_windows_left <= 0) {
      next.safety_windows_left = 0;
      next.status = ControllerStatus::kSeeking;
    }
  }

  if (action == ControlAction::kStepUp) next.voltage_mv += kSupplyStepMv;
  if (action == ControlAction::kStepDown) next.voltage_mv -= kSupplyStepMv;

  if (action == ControlAction::kHold && window_lockups == 0) {
    ++next.consecutive_holds;
  } else {
    next.consecutive_holds = 0;
    if (next.status == ControllerStatus::kSettled) {
      next.status = ControllerStatus::kSeeking;
    }
  }
  if (next.status == ControllerStatus::kSeeking &&
      next.consecutive_holds >= config.settle_windows) {
    next.status = ControllerStatus::kSettled;
  }
  return {next, action, rate};
}

int lowest_safe_voltage(const DeviceModelParams& params,
                        const ControllerConfig& config) {
  for (int v : kSupplyStepsMv) {
    const auto onset = onset_frequencies(params, v);
    if (onset.lockup_khz - static_cast<double>(config.target_freq_khz) >=
        static_cast<double>(config.safety_margin_khz)) {
      return v;
    }
  }
  throw Error(ErrorCode::kInfeasibleTarget,
              "no supply step keeps " + std::to_string(config.target_freq_khz) +
                  " kHz a safety margin below lockup onset");
}

EpisodeReport run_episode(const DeviceModelParams& params,
                          const ControllerConfig& config,
                          const GuardbandTable& table,
                          std::uint64_t episode_seed, int duration_windows) {
  params.validate();
  config.validate();
  if (duration_windows < 1) {
    throw Error(ErrorCode::kInvalidArgument, "episode needs at least one window");
  }
  const int safe_mv = lowest_safe_voltage(params, config);

  EpisodeReport report;
  report.seed = episode_seed;
  const auto baseline =
      table.lowest_voltage_for(config.target_freq_khz, ClockDomain::kCluster);
  report.no_guardband_baseline = !baseline.has_value();
  report.baseline_mv = baseline.value_or(kMaxSupplyMv);

  ControllerState state;
  state.min_mv = safe_mv;
  state.max_mv = kMaxSupplyMv;
  state.voltage_mv = std::max(report.baseline_mv, safe_mv);

  const double run_cycles = config.run_cycles(params.cycles_per_item);
  const double recovery_cost = config.recovery_cycles(params.cycles_per_item);
  const double lockup_cost = config.timeout_factor * run_cycles;
  const double freq_hz = static_cast<double>(config.target_freq_khz) * 1e3;
  const double baseline_power = power(
      params, OperatingPoint(report.baseline_mv, config.target_freq_khz),
      config.active_cores);

  std::size_t settled_runs = 0;
  std::size_t settled_errors = 0;
  double settled_energy = 0.0;
  double settled_baseline = 0.0;

  for (int w = 0; w < duration_windows; ++w) {
    const OperatingPoint op(state.voltage_mv, config.target_freq_khz);
    const auto probs = outcome_probabilities(params, op);
    UnitStream rng(derive_run_seed(episode_seed, op.voltage_mv(),
                                   op.freq_khz(), static_cast<std::uint64_t>(w),
                                   0));
    std::size_t errors = 0;
    std::size_t lockups = 0;
    for (int r = 0; r < config.window_runs; ++r) {
      const double u_lock = rng.next();
      const double u_err = rng.next();
      if (u_lock < probs.p_lockup) {
        ++lockups;
      } else if (u_err < probs.p_error) {
        ++errors;
      }
    }
    WindowTrace t{};
    t.window = static_cast<std::size_t>(w);
    t.voltage_mv = op.voltage_mv();
    t.errors = errors;
    t.lockups = lockups;
    t.useful_cycles = run_cycles * static_cast<double>(config.window_runs);
    t.recovery_cycles = recovery_cost * static_cast<double>(errors) +
                        lockup_cost * static_cast<double>(lockups);
    t.duration_s = (t.useful_cycles + t.recovery_cycles) / freq_hz;
    t.power_w = power(params, op, config.active_cores);
    t.energy_j = energy(t.power_w, t.duration_s);

    const double window_baseline =
        energy(baseline_power, t.useful_cycles / freq_hz);
    if (state.status == ControllerStatus::kSettled) {
      settled_runs += static_cast<std::size_t>(config.window_runs);
      settled_errors += errors;
      settled_energy += t.energy_j;
      settled_baseline += window_baseline;
    }

    const auto decision = controller_step(state, config, errors, lockups);
    t.rate = decision.rate;
    t.action = decision.action;
    t.status = decision.state.status;
    state = decision.state;

    report.energy_j += t.energy_j;
    report.useful_cycles += t.useful_cycles;
    report.recovery_cycles += t.recovery_cycles;
    report.lockup_events += lockups;
    report.baseline_energy_j += window_baseline;
    if (!report.settled_after_windows &&
        state.status == ControllerStatus::kSettled) {
      report.settled_after_windows = static_cast<std::size_t>(w + 1);
    }
    report.trace.push_back(t);
  }

  report.final_state = state;
  const double total_cycles = report.useful_cycles + report.recovery_cycles;
  report.overhead = total_cycles > 0.0 ? report.recovery_cycles / total_cycles
                                       : 0.0;
  report.net_savings = 1.0 - report.energy_j / report.baseline_energy_j;
  if (settled_runs > 0) {
    report.steady_state_rate = static_cast<double>(settled_errors) /
                               static_cast<double>(settled_runs);
    report.steady_state_savings = 1.0 - settled_energy / settled_baseline;
  }
  return report;
}

std::uint64_t episode_seed(std::uint64_t campaign_seed, std::uint64_t index) {
  return derive_run_seed(campaign_seed, 0, 0, 0, index);
}

std::vector<EpisodeReport> run_episodes(const DeviceModelParams& params,
                                        const ControllerConfig& config,
                                        const GuardbandTable& table,
                                        std::uint64_t campaign_seed,
                                        std::size_t count,
                                        int duration_windows,
                                        unsigned workers) {
  struct Slot {
    std::optional<EpisodeReport> report;
    std::exception_ptr failure;
  };
  std::vector<EpisodeReport> reports;
  std::exception_ptr failure;
  detail::run_ordered<Slot>(
      count, workers,
      [&](std::size_t i) {
        Slot slot;
        try {
          slot.report = run_episode(params, config, table,
                                    episode_seed(campaign_seed, i),
                                    duration_windows);
        } catch (...) {
          slot.failure = std::current_exception();
        }
        return slot;
      },
      [&](std::size_t, Slot& slot) {
        if (slot.report) reports.push_back(std::move(*slot.report));
        if (slot.failure && !failure) failure = slot.failure;
      },
      [](const Slot& slot) { return slot.failure != nullptr; });
  if (failure) std::rethrow_exception(failure);
  return reports;
}

namespace {

void write_provenance(std::ostream& out, std::string_view provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
}

template <class T>
void write_optional(std::ostream& out, const std::optional<T>& v) {
  if (!v) {
    out << "NA";
  } else if constexpr (std::is_floating_point_v<T>) {
    out << csv::format_double(*v);
  } else {
    out << *v;
  }
}

}  // namespace

void write_episode_trace_csv(std::ostream& out,
                             std::span<const EpisodeReport> reports,
                             std::string_view provenance) {
  write_provenance(out, provenance);
  out << "episode,window,voltage_mv,errors,lockups,rate,action,status,"
         "useful_cycles,recovery_cycles,duration_s,power_w,energy_j\n";
  for (std::size_t e = 0; e < reports.size(); ++e) {
    for (const auto& t : reports[e].trace) {
      out << e << ',' << t.window << ',' << t.voltage_mv << ',' << t.errors
          << ',' << t.lockups << ',' << csv::format_double(t.rate) << ','
          << to_string(t.action) << ',' << to_string(t.status) << ','
          << csv::format_double(t.useful_cycles) << ','
          << csv::format_double(t.recovery_cycles) << ','
          << csv::format_double(t.duration_s) << ','
          << csv::format_double(t.power_w) << ','
          << csv::format_double(t.energy_j) << '\n';
    }
  }
}

void write_episode_summary_csv(std::ostream& out,
                               std::span<const EpisodeReport> reports,
                               std::string_view provenance) {
  write_provenance(out, provenance);
  out << "episode,seed,energy_j,useful_cycles,recovery_cycles,overhead,"
         "lockup_events,final_status,final_voltage_mv,settled_after_windows,"
         "steady_state_rate,steady_state_savings,baseline_mv,"
         "no_guardband_baseline,baseline_energy_j,net_savings\n";
  for (std::size_t e = 0; e < reports.size(); ++e) {
    const auto& r = reports[e];
    out << e << ',' << r.seed << ',' << csv::format_double(r.energy_j) << ','
        << csv::format_double(r.useful_cycles) << ','
        << csv::format_double(r.recovery_cycles) << ','
        << csv::format_double(r.overhead) << ',' << r.lockup_events << ','
        << to_string(r.final_state.status) << ',' << r.final_state.voltage_mv
        << ',';
    write_optional(out, r.settled_after_windows);
    out << ',';
    write_optional(out, r.steady_state_rate);
    out << ',';
    write_optional(out, r.steady_state_savings);
    out << ',' << r.baseline_mv << ',' << (r.no_guardband_baseline ? 1 : 0)
        << ',' << csv::format_double(r.baseline_energy_j) << ','
        << csv::format_double(r.net_savings) << '\n';
  }
}

void write_episode_digest(std::ostream& out,
                          std::span<const EpisodeReport> reports,
                          const ControllerConfig& config) {
  std::size_t settled = 0, lockups = 0;
  double worst_overhead = 0.0, mean_savings = 0.0;
  int highest_final = kMinSupplyMv, lowest_final = kMaxSupplyMv;
  for (const auto& r : reports) {
    if (r.final_state.status == ControllerStatus::kSettled) ++settled;
    lockups += r.lockup_events;
    worst_overhead = std::max(worst_overhead, r.overhead);
    mean_savings += r.net_savings;
    highest_final = std::max(highest_final, r.final_state.voltage_mv);
    lowest_final = std::min(lowest_final, r.final_state.voltage_mv);
  }
  if (!reports.empty()) mean_savings /= static_cast<double>(reports.size());
  out << "episodes: " << reports.size() << '\n'
      << "target_freq_khz: " << config.target_freq_khz << '\n'
      << "settled: " << settled << '\n'
      << "lockup_events: " << lockups << '\n'
      << "final_voltage_mv: " << lowest_final << ".." << highest_final << '\n'
      << "worst_overhead: " << csv::format_double(worst_overhead) << '\n'
      << "mean_net_savings: " << csv::format_double(mean_savings) << '\n';
}

}  // namespace gbx
