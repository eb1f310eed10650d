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

#include "gbx/energy_analysis.hpp"

#include <algorithm>
#include <exception>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "gbx/csv.hpp"
#include "gbx/device_model.hpp"
#include "gbx/error.hpp"
#include "gbx/seeding.hpp"
#include "task_pool.hpp"

namespace gbx {

std::vector<std::int64_t> default_energy_freqs() {
  std::vector<std::int64_t> freqs;
  for (std::int64_t f = 80'000; f <= 200'000; f += 2'000) freqs.push_back(f);
  return freqs;
}

ParallelWorkloadSpec default_energy_workload() {
  return {8, 100'000'000, "parallel-decoder"};
}

std::vector<EnergyRecord> energy_sweep(Backend& backend,
                                       const ParallelWorkloadSpec& workload,
                                       std::span<const int> voltages_mv,
                                       std::span<const std::int64_t> freqs_khz,
                                       std::uint64_t campaign_seed,
                                       const EnergySweepOptions& options) {
  if (voltages_mv.empty() || freqs_khz.empty()) {
    throw Error(ErrorCode::kEmptyPlan, "energy grid is empty");
  }
  workload.validate();

  struct Slot {
    std::vector<EnergyRecord> records;
    std::exception_ptr failure;
  };
  std::vector<EnergyRecord> records;
  std::exception_ptr failure;
  const unsigned workers = backend.concurrent() ? options.workers : 1;

  detail::run_ordered<Slot>(
      voltages_mv.size(), workers,
      [&](std::size_t i) {
        Slot slot;
        try {
          for (auto f : freqs_khz) {
            const OperatingPoint op(voltages_mv[i], f);
            const auto req =
                make_parallel_request(op, workload, options.timeout_factor);
            const auto seed = derive_run_seed(campaign_seed, op.voltage_mv(), f,
                                              workload.total_cycles, 0);
            const auto resp = backend.run_parallel(req, seed);
            const bool ok = resp.status == RunStatus::kValue && resp.error_free;
            slot.records.push_back({op, resp.elapsed_s, resp.avg_power_w,
                                    energy(resp.avg_power_w, resp.elapsed_s),
                                    ok});
          }
        } catch (...) {
          slot.failure = std::current_exception();
        }
        return slot;
      },
      [&](std::size_t, Slot& slot) {
        records.insert(records.end(), slot.records.begin(), slot.records.end());
        if (slot.failure && !failure) failure = slot.failure;
      },
      [](const Slot& slot) { return slot.failure != nullptr; });

  if (failure) std::rethrow_exception(failure);
  return records;
}

SavingsReport iso_performance_savings(std::span<const EnergyRecord> records,
                                      const GuardbandTable& table) {
  struct Best {
    const EnergyRecord* baseline = nullptr;
    const EnergyRecord* candidate = nullptr;
  };
  std::map<std::int64_t, Best> by_freq;
  for (const auto& r : records) {
    auto& best = by_freq[r.op.freq_khz()];
    if (table.within(r.op) &&
        (best.baseline == nullptr || r.energy_j < best.baseline->energy_j)) {
      best.baseline = &r;
    }
    if (r.error_free &&
        (best.candidate == nullptr || r.energy_j < best.candidate->energy_j)) {
      best.candidate = &r;
    }
  }

  SavingsReport report;
  for (const auto& [freq, best] : by_freq) {
    if (best.baseline == nullptr || best.candidate == nullptr) continue;
    const FrequencySavings s{freq,
                             best.baseline->op.voltage_mv(),
                             best.candidate->op.voltage_mv(),
                             best.baseline->energy_j,
                             best.candidate->energy_j,
                             1.0 - best.candidate->energy_j /
                                       best.baseline->energy_j};
    if (report.per_freq.empty() || s.savings > report.best.savings) {
      report.best = s;
    }
    report.per_freq.push_back(s);
  }
  if (report.per_freq.empty()) {
    throw Error(ErrorCode::kNoCommonFrequency,
                "no frequency has both an in-guardband and an error-free record");
  }
  return report;
}

std::int64_t error_free_max_freq(std::span<const EnergyRecord> records,
                                 int voltage_mv) {
  std::vector<const EnergyRecord*> at_voltage;
  for (const auto& r : records) {
    if (r.op.voltage_mv() == voltage_mv) at_voltage.push_back(&r);
  }
  if (at_voltage.empty()) {
    throw Error(ErrorCode::kNoRecords,
                "no energy records at " + std::to_string(voltage_mv) + " mV");
  }
  std::sort(at_voltage.begin(), at_voltage.end(), [](auto* a, auto* b) {
    return a->op.freq_khz() < b->op.freq_khz();
  });
  std::optional<std::int64_t> best;
  for (const auto* r : at_voltage) {
    if (!r->error_free) break;
    best = r->op.freq_khz();
  }
  if (!best) {
    throw Error(ErrorCode::kInsufficientData,
                "lowest frequency at " + std::to_string(voltage_mv) +
                    " mV already fails");
  }
  return *best;
}

std::vector<MonotonicityViolation> energy_monotonicity_violations(
    std::span<const EnergyRecord> records) {
  std::map<int, std::map<std::int64_t, const EnergyRecord*>> by_voltage;
  std::map<std::int64_t, std::map<int, const EnergyRecord*>> by_freq;
  for (const auto& r : records) {
    if (!r.error_free) continue;
    by_voltage[r.op.voltage_mv()][r.op.freq_khz()] = &r;
    by_freq[r.op.freq_khz()][r.op.voltage_mv()] = &r;
  }
  std::vector<MonotonicityViolation> out;
  for (const auto& [v, row] : by_voltage) {
    const EnergyRecord* prev = nullptr;
    for (const auto& [f, r] : row) {
      if (prev != nullptr && !(r->energy_j < prev->energy_j)) {
        out.push_back({*prev, *r, true});
      }
      prev = r;
    }
  }
  for (const auto& [f, column] : by_freq) {
    const EnergyRecord* prev = nullptr;
    for (const auto& [v, r] : column) {
      if (prev != nullptr && !(r->energy_j > prev->energy_j)) {
        out.push_back({*prev, *r, false});
      }
      prev = r;
    }
  }
  return out;
}

namespace {

constexpr std::string_view kEnergyHeader =
    "voltage_mv,freq_khz,elapsed_s,avg_power_w,energy_j,error_free";

}  // namespace

void write_energy_csv(std::ostream& out, std::span<const EnergyRecord> records,
                      std::string_view provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << kEnergyHeader << '\n';
  for (const auto& r : records) {
    out << r.op.voltage_mv() << ',' << r.op.freq_khz() << ','
        << csv::format_double(r.elapsed_s) << ','
        << csv::format_double(r.avg_power_w) << ','
        << csv::format_double(r.energy_j) << ',' << (r.error_free ? 1 : 0)
        << '\n';
  }
}

std::vector<EnergyRecord> read_energy_csv(std::istream& in) {
  std::vector<EnergyRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  auto bad = [&](const std::string& what) {
    return Error(ErrorCode::kConfigError,
                 "energy line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      if (text != kEnergyHeader) throw bad("unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = csv::split(text);
    if (f.size() != 6) throw bad("expected 6 fields");
    std::int64_t v = 0, khz = 0;
    double elapsed = 0.0, watts = 0.0, joules = 0.0;
    if (!csv::parse_int64(f[0], v) || !csv::parse_int64(f[1], khz) ||
        !csv::parse_double(f[2], elapsed) || !csv::parse_double(f[3], watts) ||
        !csv::parse_double(f[4], joules) || (f[5] != "0" && f[5] != "1")) {
      throw bad("malformed field");
    }
    records.push_back({OperatingPoint(static_cast<int>(v), khz), elapsed, watts,
                       joules, f[5] == "1"});
  }
  if (!header_seen) throw bad("missing header");
  return records;
}

void write_savings_report(std::ostream& out, const SavingsReport& report,
                          std::string_view provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << "freq_khz,baseline_mv,candidate_mv,baseline_j,candidate_j,savings\n";
  for (const auto& s : report.per_freq) {
    out << s.freq_khz << ',' << s.baseline_mv << ',' << s.candidate_mv << ','
        << csv::format_double(s.baseline_j) << ','
        << csv::format_double(s.candidate_j) << ','
        << csv::format_double(s.savings) << '\n';
  }
}

}  // namespace gbx
