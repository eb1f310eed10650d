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

#include "gbx/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "gbx/avs_controller.hpp"
#include "gbx/backend.hpp"
#include "gbx/calibration.hpp"
#include "gbx/csv.hpp"
#include "gbx/energy_analysis.hpp"
#include "gbx/error.hpp"
#include "gbx/sweep.hpp"

#ifndef GBX_VERSION_STRING
#define GBX_VERSION_STRING "0.0.0"
#endif

namespace gbx::cli {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot write '" + path.string() + "'");
  }
  return out;
}

std::filesystem::path prepare_dir(const RunContext& ctx) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kInvalidArgument, "cannot create output directory '" +
                                                 ctx.out_dir.string() +
                                                 "': " + ec.message());
  }
  return ctx.out_dir;
}

std::string khz_ratio(std::int64_t khz, std::int64_t guardband_khz) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3)
    << static_cast<double>(khz) / static_cast<double>(guardband_khz);
  return s.str();
}

std::string percent(double fraction) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << fraction * 100.0 << '%';
  return s.str();
}

template <class T>
std::string or_na(const std::optional<T>& v) {
  return v ? std::to_string(*v) : std::string("NA");
}

void report_characterization(std::ostream& out, const FailureSummary& summary,
                             const GuardbandTable& table,
                             std::span<const TestRecord> records) {
  out << "voltage_mv guardband_khz first_error_khz headroom first_lockup_khz "
         "lockup_minus_error_khz error_p5_p95_khz onset_gap_khz\n";
  for (const auto& v : summary.voltages) {
    const auto gb = table.max_freq_khz(v.voltage_mv, ClockDomain::kCluster);
    out << v.voltage_mv << ' ' << gb << ' ' << or_na(v.first_error_khz) << ' '
        << (v.first_error_khz ? khz_ratio(*v.first_error_khz, gb) : "NA") << ' '
        << or_na(v.first_lockup_khz) << ' ';
    if (v.first_error_khz && v.first_lockup_khz) {
      out << *v.first_lockup_khz - *v.first_error_khz;
    } else {
      out << "NA";
    }
    out << ' ';
    if (v.error_khz) {
      out << v.error_khz->p95 - v.error_khz->p5;
    } else {
      out << "NA";
    }
    out << ' ';
    if (v.error_onset_khz && v.lockup_onset_khz) {
      out << v.lockup_onset_khz->p50 - v.error_onset_khz->p50;
    } else {
      out << "NA";
    }
    out << '\n';
  }
  try {
    const auto si = size_independence_test(records);
    out << "size_independence effect=" << csv::format_double(si.effect)
        << " threshold=" << csv::format_double(si.threshold)
        << " pass=" << (si.pass ? "yes" : "no") << '\n';
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientData) throw;
    out << "size_independence NA (" << e.what() << ")\n";
  }
}

void report_energy(std::ostream& out, std::span<const EnergyRecord> records,
                   const GuardbandTable& table) {
  try {
    const auto s = iso_performance_savings(records, table);
    out << "max_savings " << percent(s.best.savings) << " at "
        << s.best.freq_khz << " kHz (" << s.best.baseline_mv << " mV -> "
        << s.best.candidate_mv << " mV)\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoCommonFrequency) throw;
    out << "max_savings NA (" << e.what() << ")\n";
  }
  std::set<int> voltages;
  for (const auto& r : records) voltages.insert(r.op.voltage_mv());
  for (int v : voltages) {
    out << "error_free_max_khz " << v << " mV ";
    try {
      out << error_free_max_freq(records, v) << '\n';
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientData) throw;
      out << "NA\n";
    }
  }
  const auto violations = energy_monotonicity_violations(records);
  out << "energy_monotonicity_violations " << violations.size() << '\n';
}

}  // namespace

std::string_view tool_version() noexcept { return GBX_VERSION_STRING; }

std::string provenance(const CampaignConfig& config) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config.hash));
  return "gbx " + std::string(tool_version()) + " config=" + hash +
         " seed=" + std::to_string(config.campaign_seed);
}

DeviceModelParams resolve_params(const CampaignConfig& config) {
  if (config.model) return *config.model;
  return calibrate(config.guardband, config.targets).params;
}

void cmd_calibrate(const RunContext& ctx) {
  const auto dir = prepare_dir(ctx);
  const auto result = calibrate(ctx.config.guardband, ctx.config.targets);
  auto file = open_output(dir / "calibration.txt");
  file << "# " << provenance(ctx.config) << '\n';
  write_calibration_report(file, result);

  auto& out = *ctx.out;
  out << "voltage_mv target_khz error_onset_khz lockup_onset_khz rel_error\n";
  for (const auto& o : result.onsets) {
    out << o.voltage_mv << ' ' << csv::format_double(o.target_khz) << ' '
        << csv::format_double(o.error_khz) << ' '
        << csv::format_double(o.lockup_khz) << ' '
        << csv::format_double(o.rel_error) << '\n';
  }
  out << "reference_savings " << percent(result.reference_savings) << '\n'
      << "wrote " << (dir / "calibration.txt").string() << '\n';
}

void cmd_characterize(const RunContext& ctx) {
  const auto dir = prepare_dir(ctx);
  const auto params = resolve_params(ctx.config);
  SimulatedBackend backend(params);
  const auto prov = provenance(ctx.config);

  std::vector<TestRecord> records;
  {
    auto file = open_output(dir / "records.csv");
    CsvRecordSink sink(file, prov);
    records = execute_plan(backend, ctx.config.sweep, ctx.config.campaign_seed,
                           {ctx.workers, &sink});
  }
  const auto summary = summarize(records, /*allow_no_failures=*/true);
  {
    auto file = open_output(dir / "summary.csv");
    write_summary_csv(file, summary, ctx.config.guardband, prov);
  }
  auto& out = *ctx.out;
  out << "records " << records.size() << '\n';
  report_characterization(out, summary, ctx.config.guardband, records);
  out << "wrote " << (dir / "records.csv").string() << ", "
      << (dir / "summary.csv").string() << '\n';
}

void cmd_energy(const RunContext& ctx) {
  const auto dir = prepare_dir(ctx);
  const auto params = resolve_params(ctx.config);
  SimulatedBackend backend(params);
  const auto prov = provenance(ctx.config);
  const auto& grid = ctx.config.energy;

  const auto records =
      energy_sweep(backend, grid.workload, grid.voltages_mv, grid.freqs_khz,
                   ctx.config.campaign_seed, {ctx.workers});
  {
    auto file = open_output(dir / "energy.csv");
    write_energy_csv(file, records, prov);
  }
  const auto savings = iso_performance_savings(records, ctx.config.guardband);
  {
    auto file = open_output(dir / "savings.csv");
    write_savings_report(file, savings, prov);
  }
  auto& out = *ctx.out;
  out << "records " << records.size() << '\n';
  report_energy(out, records, ctx.config.guardband);
  out << "wrote " << (dir / "energy.csv").string() << ", "
      << (dir / "savings.csv").string() << '\n';
}

void cmd_control(const RunContext& ctx, std::optional<std::size_t> episodes) {
  const auto dir = prepare_dir(ctx);
  const auto params = resolve_params(ctx.config);
  const auto prov = provenance(ctx.config);
  const auto& campaign = ctx.config.control;
  const auto count = episodes.value_or(campaign.episodes);
  if (count == 0) {
    throw Error(ErrorCode::kConfigError, "--episodes: must be positive");
  }

  const auto reports =
      run_episodes(params, campaign.controller, ctx.config.guardband,
                   ctx.config.campaign_seed, count, campaign.windows,
                   ctx.workers);
  {
    auto file = open_output(dir / "episodes.csv");
    write_episode_summary_csv(file, reports, prov);
  }
  {
    auto file = open_output(dir / "controller_trace.csv");
    write_episode_trace_csv(file, reports, prov);
  }
  {
    auto file = open_output(dir / "control_summary.txt");
    file << "# " << prov << '\n';
    write_episode_digest(file, reports, campaign.controller);
  }
  write_episode_digest(*ctx.out, reports, campaign.controller);
  *ctx.out << "wrote " << (dir / "episodes.csv").string() << ", "
           << (dir / "controller_trace.csv").string() << '\n';
}

void cmd_report(const RunContext& ctx) {
  const auto& dir = ctx.out_dir;
  std::ostringstream text;
  bool any = false;
  if (std::ifstream in(dir / "records.csv"); in) {
    const auto records = read_records_csv(in);
    if (!records.empty()) {
      text << "## characterization (" << records.size() << " records)\n";
      report_characterization(text, summarize(records, true),
                              ctx.config.guardband, records);
      any = true;
    }
  }
  if (std::ifstream in(dir / "energy.csv"); in) {
    const auto records = read_energy_csv(in);
    if (!records.empty()) {
      text << "## energy (" << records.size() << " records)\n";
      report_energy(text, records, ctx.config.guardband);
      any = true;
    }
  }
  if (std::ifstream in(dir / "control_summary.txt"); in) {
    text << "## control\n";
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.front() != '#') text << line << '\n';
    }
    any = true;
  }
  if (!any) {
    throw Error(ErrorCode::kNoRecords,
                "no campaign outputs found in '" + dir.string() + "'");
  }
  auto file = open_output(dir / "report.txt");
  file << "# " << provenance(ctx.config) << '\n' << text.str();
  *ctx.out << text.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Guardband-violation exploration on a calibrated device model",
               "gbx"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::string out_dir;
  app.add_option("--config", config_path, "Campaign config (JSON)");
  app.add_option("--seed", seed, "Campaign seed, overrides the config");
  app.add_option("--workers", workers, "Worker threads, 0 for all cores");
  app.add_option("--out", out_dir, "Output directory, overrides the config");

  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "Fit the device model and write its report");
  auto* characterize_cmd =
      app.add_subcommand("characterize", "Run the failure sweep");
  auto* energy_cmd = app.add_subcommand("energy", "Run the energy sweep");
  auto* control_cmd =
      app.add_subcommand("control", "Run closed-loop voltage control episodes");
  auto* report_cmd =
      app.add_subcommand("report", "Summarize outputs already in --out");
  std::optional<std::size_t> episodes;
  control_cmd->add_option("--episodes", episodes, "Number of seeded episodes");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<const char*> argv{"gbx"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "gbx: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    RunContext ctx;
    ctx.config = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) {
      ctx.config.campaign_seed = *seed;
    }
    ctx.workers = workers;
    ctx.out_dir = out_dir.empty() ? ctx.config.output_dir
                                  : std::filesystem::path(out_dir);
    ctx.out = &out;
    out << "# " << provenance(ctx.config) << '\n';

    if (calibrate_cmd->parsed()) cmd_calibrate(ctx);
    if (characterize_cmd->parsed()) cmd_characterize(ctx);
    if (energy_cmd->parsed()) cmd_energy(ctx);
    if (control_cmd->parsed()) cmd_control(ctx, episodes);
    if (report_cmd->parsed()) cmd_report(ctx);
  } catch (const Error& e) {
    err << "gbx: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::kConfigError ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "gbx: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace gbx::cli
