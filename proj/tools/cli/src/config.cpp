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

#include "gbx/cli/config.hpp"

#include <fstream>
#include <climits>
#include <cstdint>
#include <set>
#include <sstream>
#include <type_traits>
#include <utility>

#include "json.hpp"

#include "gbx/energy_analysis.hpp"
#include "gbx/error.hpp"

namespace gbx::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfigError, path + ": " + what);
}

// Strict view of one JSON object: every key must be consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  Section child(const std::string& key) { return Section(raw(key), path(key)); }

  void read(const std::string& key, double& out) {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_number()) fail(path(key), "expected a number");
    out = v.get<double>();
  }
  void read(const std::string& key, std::int64_t& out) {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_number_integer()) fail(path(key), "expected an integer");
    if (v.is_number_unsigned() &&
        v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      fail(path(key), "integer out of range");
    }
    out = v.get<std::int64_t>();
  }
  void read(const std::string& key, int& out) {
    std::int64_t wide = out;
    read(key, wide);
    if (wide < INT32_MIN || wide > INT32_MAX) fail(path(key), "integer out of range");
    out = static_cast<int>(wide);
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    out = to_u64(raw(key), path(key));
  }
  void read(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_string()) fail(path(key), "expected a string");
    out = v.get<std::string>();
  }

  template <class T>
  void read_list(const std::string& key, std::vector<T>& out) {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_array()) fail(path(key), "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto item_path = path(key) + "[" + std::to_string(i) + "]";
      if constexpr (std::is_same_v<T, std::uint64_t>) {
        out.push_back(to_u64(v[i], item_path));
      } else {
        if (!v[i].is_number_integer()) fail(item_path, "expected an integer");
        const auto wide = v[i].get<std::int64_t>();
        if constexpr (std::is_same_v<T, int>) {
          if (wide < INT32_MIN || wide > INT32_MAX) {
            fail(item_path, "integer out of range");
          }
        }
        out.push_back(static_cast<T>(wide));
      }
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (used_.count(key) == 0) fail(path(key), "unknown field");
    }
  }

 private:
  static std::uint64_t to_u64(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      const auto s = v.get<std::int64_t>();
      if (s < 0) fail(where, "expected a non-negative integer");
      return static_cast<std::uint64_t>(s);
    }
    if (v.is_string()) {
      const auto text = v.get<std::string>();
      try {
        std::size_t used = 0;
        const auto value = std::stoull(text, &used, 0);
        if (used == text.size()) return value;
      } catch (const std::exception&) {
      }
      fail(where, "cannot parse '" + text + "' as an unsigned integer");
    }
    fail(where, "expected an unsigned integer");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

// Runs a module validator, re-raising its complaint as a config error.
template <class F>
void validated(const std::string& path, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    fail(path, e.what());
  }
}

json parse_json(std::string_view text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(where, std::string("invalid JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path,
                      const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(field, "cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void read_targets(Section s, CalibrationTargets& t) {
  s.read("multiplier_at_min_mv", t.multiplier_at_min_mv);
  s.read("multiplier_at_max_mv", t.multiplier_at_max_mv);
  s.read("onset_margin_khz", t.onset_margin_khz);
  s.read("crossover_mv", t.crossover_mv);
  s.read("lock_offset_at_min_khz", t.lock_offset_at_min_khz);
  s.read("w_err_khz", t.w_err_khz);
  s.read("w_lock_khz", t.w_lock_khz);
  s.read("savings_target", t.savings_target);
  s.read("reference_freq_khz", t.reference_freq_khz);
  s.read("reference_cores", t.reference_cores);
  s.read("c_eff", t.c_eff);
  s.read("cycles_per_item", t.cycles_per_item);
  s.read("tolerance", t.tolerance);
  s.finish();
}

void read_model(Section s, DeviceModelParams& p) {
  s.read("v_th_mv", p.v_th_mv);
  s.read("alpha", p.alpha);
  s.read("k_err", p.k_err);
  s.read("k_lock", p.k_lock);
  s.read("w_err_khz", p.w_err_khz);
  s.read("w_lock_khz", p.w_lock_khz);
  s.read("crossover_mv", p.crossover_mv);
  s.read("lock_offset_slope_khz_per_mv", p.lock_offset_slope_khz_per_mv);
  s.read("c_eff", p.c_eff);
  s.read("p_static_coeff", p.p_static_coeff);
  s.read("cycles_per_item", p.cycles_per_item);
  if (s.has("supply_offset")) {
    auto o = s.child("supply_offset");
    SupplyOffset offset;
    o.read("from_mv", offset.from_mv);
    o.read("offset_mv", offset.offset_mv);
    o.finish();
    p.supply_offset = offset;
  }
  s.finish();
}

void read_sweep(Section s, SweepPlan& plan) {
  s.read_list("voltages_mv", plan.voltages_mv);
  s.read("start_freq_khz", plan.start_freq_khz);
  s.read("freq_step_khz", plan.freq_step_khz);
  s.read_list("sizes", plan.sizes);
  s.read("repetitions", plan.repetitions);
  s.read("freq_limit_khz", plan.freq_limit_khz);
  s.read("timeout_factor", plan.timeout_factor);
  s.read("workload_seed", plan.workload_seed);
  if (s.has("stop_rule")) {
    auto r = s.child("stop_rule");
    std::string kind = "stop_on_first_lockup";
    r.read("kind", kind);
    if (kind == "stop_on_first_lockup") {
      plan.stop_rule = StopRule::stop_on_first_lockup();
    } else if (kind == "fixed_ceiling") {
      if (!r.has("ceiling_khz")) fail(r.path("ceiling_khz"), "required field");
      std::int64_t ceiling = 0;
      r.read("ceiling_khz", ceiling);
      plan.stop_rule = StopRule::fixed_ceiling(ceiling);
    } else {
      fail(r.path("kind"), "expected stop_on_first_lockup or fixed_ceiling");
    }
    r.finish();
  }
  s.finish();
}

void read_energy(Section s, EnergyGrid& grid) {
  s.read_list("voltages_mv", grid.voltages_mv);
  if (s.has("freqs_khz") && s.has("freq_range")) {
    fail(s.path("freq_range"), "conflicts with freqs_khz");
  }
  s.read_list("freqs_khz", grid.freqs_khz);
  if (s.has("freq_range")) {
    auto r = s.child("freq_range");
    std::int64_t start = 0, stop = 0, step = 0;
    for (const char* key : {"start_khz", "stop_khz", "step_khz"}) {
      if (!r.has(key)) fail(r.path(key), "required field");
    }
    r.read("start_khz", start);
    r.read("stop_khz", stop);
    r.read("step_khz", step);
    r.finish();
    if (step <= 0) fail(r.path("step_khz"), "must be positive");
    grid.freqs_khz.clear();
    for (auto f = start; f <= stop; f += step) grid.freqs_khz.push_back(f);
  }
  if (s.has("workload")) {
    auto w = s.child("workload");
    w.read("n_cores", grid.workload.n_cores);
    w.read("total_cycles", grid.workload.total_cycles);
    w.read("name", grid.workload.name);
    w.finish();
  }
  s.finish();
}

void read_control(Section s, ControlCampaign& c) {
  auto& cfg = c.controller;
  s.read("target_freq_khz", cfg.target_freq_khz);
  s.read("window_runs", cfg.window_runs);
  s.read("rate_lo", cfg.rate_lo);
  s.read("rate_hi", cfg.rate_hi);
  if (s.has("recovery_cost_cycles")) {
    double cycles = 0.0;
    s.read("recovery_cost_cycles", cycles);
    cfg.recovery_cost_cycles = cycles;
  }
  s.read("settle_windows", cfg.settle_windows);
  s.read("run_items", cfg.run_items);
  s.read("active_cores", cfg.active_cores);
  s.read("safety_margin_khz", cfg.safety_margin_khz);
  s.read("timeout_factor", cfg.timeout_factor);
  std::uint64_t episodes = c.episodes;
  s.read("episodes", episodes);
  c.episodes = static_cast<std::size_t>(episodes);
  s.read("windows", c.windows);
  s.finish();
}

void read_guardband(Section s, GuardbandTable& table) {
  if (!s.has("rows")) fail(s.path("rows"), "required field");
  const auto& rows = s.raw("rows");
  if (!rows.is_array()) fail(s.path("rows"), "expected an array");
  std::vector<GuardbandRow> parsed;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Section r(rows[i], s.path("rows") + "[" + std::to_string(i) + "]");
    GuardbandRow row{0, 0, 0};
    for (const char* key : {"voltage_mv", "fc_max_khz", "cluster_max_khz"}) {
      if (!r.has(key)) fail(r.path(key), "required field");
    }
    r.read("voltage_mv", row.voltage_mv);
    r.read("fc_max_khz", row.fc_max_khz);
    r.read("cluster_max_khz", row.cluster_max_khz);
    r.finish();
    parsed.push_back(row);
  }
  s.finish();
  validated(s.path("rows"), [&] { table = GuardbandTable(std::move(parsed)); });
}

json targets_json(const CalibrationTargets& t) {
  return {{"multiplier_at_min_mv", t.multiplier_at_min_mv},
          {"multiplier_at_max_mv", t.multiplier_at_max_mv},
          {"onset_margin_khz", t.onset_margin_khz},
          {"crossover_mv", t.crossover_mv},
          {"lock_offset_at_min_khz", t.lock_offset_at_min_khz},
          {"w_err_khz", t.w_err_khz},
          {"w_lock_khz", t.w_lock_khz},
          {"savings_target", t.savings_target},
          {"reference_freq_khz", t.reference_freq_khz},
          {"reference_cores", t.reference_cores},
          {"c_eff", t.c_eff},
          {"cycles_per_item", t.cycles_per_item},
          {"tolerance", t.tolerance}};
}

json model_json(const DeviceModelParams& p) {
  json j{{"v_th_mv", p.v_th_mv},
         {"alpha", p.alpha},
         {"k_err", p.k_err},
         {"k_lock", p.k_lock},
         {"w_err_khz", p.w_err_khz},
         {"w_lock_khz", p.w_lock_khz},
         {"crossover_mv", p.crossover_mv},
         {"lock_offset_slope_khz_per_mv", p.lock_offset_slope_khz_per_mv},
         {"c_eff", p.c_eff},
         {"p_static_coeff", p.p_static_coeff},
         {"cycles_per_item", p.cycles_per_item}};
  if (p.supply_offset) {
    j["supply_offset"] = {{"from_mv", p.supply_offset->from_mv},
                          {"offset_mv", p.supply_offset->offset_mv}};
  }
  return j;
}

}  // namespace

CampaignConfig default_config() {
  CampaignConfig c;
  c.energy.freqs_khz = default_energy_freqs();
  c.energy.workload = default_energy_workload();
  c.hash = fnv1a64(dump_config(c));
  return c;
}

CampaignConfig parse_config(std::string_view json_text,
                            const std::filesystem::path& base_dir) {
  const auto doc = parse_json(json_text, "config");
  CampaignConfig c = default_config();
  Section root(doc, "");

  root.read("campaign_seed", c.campaign_seed);
  if (root.has("output_dir")) {
    std::string dir;
    root.read("output_dir", dir);
    c.output_dir = dir;
  }
  if (root.has("guardband")) read_guardband(root.child("guardband"), c.guardband);
  if (root.has("calibration")) {
    auto cal = root.child("calibration");
    if (cal.has("targets_file")) {
      std::string file;
      cal.read("targets_file", file);
      const auto field = cal.path("targets_file");
      const auto text = read_file(base_dir / file, field);
      read_targets(Section(parse_json(text, field), field), c.targets);
    }
    read_targets(std::move(cal), c.targets);
  }
  if (root.has("model")) {
    DeviceModelParams p;
    read_model(root.child("model"), p);
    validated("model", [&] { p.validate(); });
    c.model = p;
  }
  if (root.has("sweep")) read_sweep(root.child("sweep"), c.sweep);
  if (root.has("energy")) read_energy(root.child("energy"), c.energy);
  if (root.has("controller")) read_control(root.child("controller"), c.control);
  root.finish();

  validated("calibration", [&] { c.targets.validate(); });
  validated("sweep", [&] { c.sweep.validate(); });
  validated("energy", [&] {
    if (c.energy.voltages_mv.empty() || c.energy.freqs_khz.empty()) {
      throw Error(ErrorCode::kEmptyPlan, "energy grid is empty");
    }
    for (int v : c.energy.voltages_mv) {
      for (auto f : c.energy.freqs_khz) OperatingPoint(v, f);
    }
    c.energy.workload.validate();
  });
  validated("controller", [&] {
    c.control.controller.validate();
    if (c.control.episodes == 0) {
      throw Error(ErrorCode::kInvalidArgument, "episodes must be positive");
    }
    if (c.control.windows < 1) {
      throw Error(ErrorCode::kInvalidArgument, "windows must be positive");
    }
  });
  c.hash = fnv1a64(dump_config(c));
  return c;
}

CampaignConfig load_config(const std::filesystem::path& path) {
  const auto text = read_file(path, "--config");
  return parse_config(text, path.parent_path());
}

std::string dump_config(const CampaignConfig& c) {
  json rows = json::array();
  for (const auto& r : c.guardband.rows()) {
    rows.push_back({{"voltage_mv", r.voltage_mv},
                    {"fc_max_khz", r.fc_max_khz},
                    {"cluster_max_khz", r.cluster_max_khz}});
  }
  json stop{{"kind", c.sweep.stop_rule.kind == StopKind::kFixedCeiling
                         ? "fixed_ceiling"
                         : "stop_on_first_lockup"}};
  if (c.sweep.stop_rule.kind == StopKind::kFixedCeiling) {
    stop["ceiling_khz"] = c.sweep.stop_rule.ceiling_khz;
  }
  const auto& cfg = c.control.controller;
  json controller{{"target_freq_khz", cfg.target_freq_khz},
                  {"window_runs", cfg.window_runs},
                  {"rate_lo", cfg.rate_lo},
                  {"rate_hi", cfg.rate_hi},
                  {"settle_windows", cfg.settle_windows},
                  {"run_items", cfg.run_items},
                  {"active_cores", cfg.active_cores},
                  {"safety_margin_khz", cfg.safety_margin_khz},
                  {"timeout_factor", cfg.timeout_factor},
                  {"episodes", c.control.episodes},
                  {"windows", c.control.windows}};
  if (cfg.recovery_cost_cycles) {
    controller["recovery_cost_cycles"] = *cfg.recovery_cost_cycles;
  }
  json doc{
      {"campaign_seed", c.campaign_seed},
      {"output_dir", c.output_dir.generic_string()},
      {"guardband", {{"rows", rows}}},
      {"calibration", targets_json(c.targets)},
      {"sweep",
       {{"voltages_mv", c.sweep.voltages_mv},
        {"start_freq_khz", c.sweep.start_freq_khz},
        {"freq_step_khz", c.sweep.freq_step_khz},
        {"sizes", c.sweep.sizes},
        {"repetitions", c.sweep.repetitions},
        {"stop_rule", stop},
        {"freq_limit_khz", c.sweep.freq_limit_khz},
        {"timeout_factor", c.sweep.timeout_factor},
        {"workload_seed", c.sweep.workload_seed}}},
      {"energy",
       {{"voltages_mv", c.energy.voltages_mv},
        {"freqs_khz", c.energy.freqs_khz},
        {"workload",
         {{"n_cores", c.energy.workload.n_cores},
          {"total_cycles", c.energy.workload.total_cycles},
          {"name", c.energy.workload.name}}}}},
      {"controller", controller}};
  if (c.model) doc["model"] = model_json(*c.model);
  return doc.dump(2) + "\n";
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gbx::cli
