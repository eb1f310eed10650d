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

#include "gbx/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>

#include "gbx/csv.hpp"
#include "gbx/device_model.hpp"
#include "gbx/error.hpp"
#include "gbx/seeding.hpp"
#include "task_pool.hpp"

namespace gbx {

std::vector<std::uint64_t> default_sizes() {
  std::vector<std::uint64_t> sizes;
  for (std::uint64_t n = 50'000; n <= 1'000'000; n += 50'000) sizes.push_back(n);
  return sizes;
}

void SweepPlan::validate() const {
  if (voltages_mv.empty() || sizes.empty()) {
    throw Error(ErrorCode::kEmptyPlan, "sweep plan needs voltages and sizes");
  }
  for (int v : voltages_mv) {
    if (!is_supply_step(v)) {
      throw Error(ErrorCode::kUnsupportedVoltage,
                  std::to_string(v) + " mV is not a supply step");
    }
  }
  if (std::set<int>(voltages_mv.begin(), voltages_mv.end()).size() !=
      voltages_mv.size()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate voltage in sweep plan");
  }
  for (auto n : sizes) {
    if (n == 0) throw Error(ErrorCode::kInvalidArgument, "problem size must be >= 1");
  }
  if (start_freq_khz <= 0 || freq_step_khz <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "start frequency and step must be positive");
  }
  if (repetitions < 1) {
    throw Error(ErrorCode::kEmptyPlan, "repetitions must be at least 1");
  }
  const auto top = stop_rule.kind == StopKind::kFixedCeiling
                       ? stop_rule.ceiling_khz
                       : freq_limit_khz;
  if (top < start_freq_khz) {
    throw Error(ErrorCode::kEmptyPlan, "frequency axis is empty");
  }
  if (!(timeout_factor > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "timeout factor must exceed 1");
  }
  if (workload_seed == 0) {
    throw Error(ErrorCode::kInvalidSeed, "workload seed must be non-zero");
  }
}

std::vector<std::int64_t> SweepPlan::frequencies() const {
  const auto top = stop_rule.kind == StopKind::kFixedCeiling
                       ? stop_rule.ceiling_khz
                       : freq_limit_khz;
  std::vector<std::int64_t> freqs;
  for (auto f = start_freq_khz; f <= top; f += freq_step_khz) freqs.push_back(f);
  return freqs;
}

std::vector<PlanPoint> enumerate_plan(const SweepPlan& plan) {
  plan.validate();
  const auto freqs = plan.frequencies();
  std::vector<PlanPoint> points;
  points.reserve(plan.voltages_mv.size() * freqs.size() * plan.sizes.size() *
                 static_cast<std::size_t>(plan.repetitions));
  for (int v : plan.voltages_mv) {
    for (auto f : freqs) {
      for (auto n : plan.sizes) {
        for (int r = 0; r < plan.repetitions; ++r) points.push_back({v, f, n, r});
      }
    }
  }
  return points;
}

std::string_view to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::kCorrect: return "correct";
    case Outcome::kError: return "error";
    case Outcome::kLockup: return "lockup";
  }
  return "?";
}

namespace {

struct TaskResult {
  std::vector<TestRecord> records;
  std::exception_ptr failure;
};

// Runs one voltage, or one (voltage, frequency) slice under FixedCeiling.
TaskResult run_slice(Backend& backend, const SweepPlan& plan,
                     std::uint64_t campaign_seed, GoldenCache& golden,
                     int voltage_mv, std::span<const std::int64_t> freqs) {
  TaskResult out;
  try {
    for (auto f : freqs) {
      const OperatingPoint op(voltage_mv, f);
      for (auto n : plan.sizes) {
        const PrngSpec spec{plan.workload_seed, n};
        const auto expected = golden.golden_value(spec);
        const auto req = make_run_request(op, spec, backend.cycles_per_item(),
                                          plan.timeout_factor);
        for (int rep = 0; rep < plan.repetitions; ++rep) {
          const auto seed = derive_run_seed(campaign_seed, voltage_mv, f, n,
                                            static_cast<std::uint64_t>(rep));
          const auto resp = backend.run(req, seed);
          Outcome outcome = Outcome::kCorrect;
          if (resp.timed_out()) {
            outcome = Outcome::kLockup;
          } else if (resp.value != expected) {
            outcome = Outcome::kError;
          }
          out.records.push_back({op, n, rep, outcome, resp.elapsed_s,
                                 energy(resp.avg_power_w, resp.elapsed_s)});
          if (outcome == Outcome::kLockup &&
              plan.stop_rule.kind == StopKind::kStopOnFirstLockup) {
            return out;
          }
        }
      }
    }
  } catch (...) {
    out.failure = std::current_exception();
  }
  return out;
}

}  // namespace

std::vector<TestRecord> execute_plan(Backend& backend, const SweepPlan& plan,
                                     std::uint64_t campaign_seed,
                                     const ExecutionOptions& options) {
  plan.validate();
  const auto freqs = plan.frequencies();
  const bool per_frequency = plan.stop_rule.kind == StopKind::kFixedCeiling;

  struct Slice {
    int voltage_mv;
    std::span<const std::int64_t> freqs;
  };
  std::vector<Slice> slices;
  for (int v : plan.voltages_mv) {
    if (per_frequency) {
      for (std::size_t i = 0; i < freqs.size(); ++i) {
        slices.push_back({v, std::span<const std::int64_t>(freqs).subspan(i, 1)});
      }
    } else {
      slices.push_back({v, freqs});
    }
  }

  GoldenCache golden;
  std::vector<TestRecord> records;
  std::exception_ptr failure;
  const unsigned workers = backend.concurrent() ? options.workers : 1;

  detail::run_ordered<TaskResult>(
      slices.size(), workers,
      [&](std::size_t i) {
        return run_slice(backend, plan, campaign_seed, golden,
                         slices[i].voltage_mv, slices[i].freqs);
      },
      [&](std::size_t, TaskResult& r) {
        if (options.sink != nullptr && !r.records.empty()) {
          options.sink->append(r.records);
        }
        records.insert(records.end(), r.records.begin(), r.records.end());
        if (r.failure && !failure) failure = r.failure;
      },
      [](const TaskResult& r) { return r.failure != nullptr; });

  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kBackendFailure, e.what());
    }
  }
  return records;
}

std::int64_t nearest_rank(std::span<const std::int64_t> sorted, double pct) {
  if (sorted.empty()) {
    throw Error(ErrorCode::kInsufficientData, "percentile of an empty sample");
  }
  auto rank = static_cast<std::size_t>(
      std::ceil(pct / 100.0 * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

Quantiles quantiles(std::vector<std::int64_t> values) {
  std::sort(values.begin(), values.end());
  return {nearest_rank(values, 5), nearest_rank(values, 25),
          nearest_rank(values, 50), nearest_rank(values, 75),
          nearest_rank(values, 95)};
}

bool FailureSummary::any_failures() const noexcept {
  return std::any_of(voltages.begin(), voltages.end(), [](const auto& v) {
    return v.n_errors > 0 || v.n_lockups > 0;
  });
}

const VoltageFailures* FailureSummary::at(int voltage_mv) const noexcept {
  for (const auto& v : voltages) {
    if (v.voltage_mv == voltage_mv) return &v;
  }
  return nullptr;
}

FailureSummary summarize(std::span<const TestRecord> records,
                         bool allow_no_failures) {
  if (records.empty()) {
    throw Error(ErrorCode::kNoRecords, "nothing to summarize");
  }
  struct Acc {
    VoltageFailures stats;
    std::vector<std::int64_t> errors, lockups;
    std::map<std::pair<std::uint64_t, int>, std::int64_t> error_onset,
        lockup_onset;
  };
  std::map<int, Acc> by_voltage;
  for (const auto& r : records) {
    auto& acc = by_voltage[r.op.voltage_mv()];
    ++acc.stats.n_records;
    const auto f = r.op.freq_khz();
    const auto series = std::make_pair(r.n_items, r.repetition);
    auto note_onset = [&](auto& onsets) {
      auto [it, inserted] = onsets.emplace(series, f);
      if (!inserted) it->second = std::min(it->second, f);
    };
    if (r.outcome == Outcome::kError) {
      ++acc.stats.n_errors;
      acc.errors.push_back(f);
      note_onset(acc.error_onset);
    } else if (r.outcome == Outcome::kLockup) {
      ++acc.stats.n_lockups;
      acc.lockups.push_back(f);
      note_onset(acc.lockup_onset);
    }
  }

  FailureSummary summary;
  for (auto& [voltage, acc] : by_voltage) {
    auto& s = acc.stats;
    s.voltage_mv = voltage;
    auto onsets = [](const auto& m) {
      std::vector<std::int64_t> v;
      for (const auto& [key, f] : m) v.push_back(f);
      return v;
    };
    if (!acc.errors.empty()) {
      s.first_error_khz = *std::min_element(acc.errors.begin(), acc.errors.end());
      s.error_khz = quantiles(acc.errors);
      s.error_onset_khz = quantiles(onsets(acc.error_onset));
    }
    if (!acc.lockups.empty()) {
      s.first_lockup_khz =
          *std::min_element(acc.lockups.begin(), acc.lockups.end());
      s.lockup_khz = quantiles(acc.lockups);
      s.lockup_onset_khz = quantiles(onsets(acc.lockup_onset));
    }
    summary.voltages.push_back(s);
  }
  if (!allow_no_failures && !summary.any_failures()) {
    throw Error(ErrorCode::kNoFailuresObserved,
                "no error or lockup among " + std::to_string(records.size()) +
                    " records");
  }
  return summary;
}

SizeIndependence size_independence_test(std::span<const TestRecord> records,
                                        double threshold) {
  std::set<std::pair<int, std::int64_t>> erroneous;
  for (const auto& r : records) {
    if (r.outcome == Outcome::kError) {
      erroneous.emplace(r.op.voltage_mv(), r.op.freq_khz());
    }
  }
  if (erroneous.empty()) {
    throw Error(ErrorCode::kInsufficientData, "no error outcomes recorded");
  }
  std::map<std::uint64_t, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& r : records) {
    if (erroneous.count({r.op.voltage_mv(), r.op.freq_khz()}) == 0) continue;
    auto& [runs, errors] = counts[r.n_items];
    ++runs;
    if (r.outcome == Outcome::kError) ++errors;
  }
  if (counts.size() < 5) {
    throw Error(ErrorCode::kInsufficientData,
                "need at least 5 problem sizes at erroneous points, got " +
                    std::to_string(counts.size()));
  }

  SizeIndependence result;
  result.threshold = threshold;
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [n, c] : counts) {
    const double rate = static_cast<double>(c.second) / static_cast<double>(c.first);
    result.rates.push_back({n, c.first, c.second, rate});
    mean_x += static_cast<double>(n);
    mean_y += rate;
  }
  const auto k = static_cast<double>(result.rates.size());
  mean_x /= k;
  mean_y /= k;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& r : result.rates) {
    const double dx = static_cast<double>(r.n_items) - mean_x;
    sxy += dx * (r.rate - mean_y);
    sxx += dx * dx;
  }
  result.slope_per_item = sxy / sxx;
  const double range = static_cast<double>(result.rates.back().n_items -
                                           result.rates.front().n_items);
  result.effect = result.slope_per_item * range;
  result.pass = std::abs(result.effect) < threshold;
  return result;
}

namespace {

constexpr std::string_view kRecordsHeader =
    "voltage_mv,freq_khz,n_items,rep,outcome,elapsed_s,energy_j";

void write_record(std::ostream& out, const TestRecord& r) {
  out << r.op.voltage_mv() << ',' << r.op.freq_khz() << ',' << r.n_items << ','
      << r.repetition << ',' << to_string(r.outcome) << ','
      << csv::format_double(r.elapsed_s) << ','
      << csv::format_double(r.energy_j) << '\n';
}

void write_provenance(std::ostream& out, std::string_view provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
}

}  // namespace

void write_records_csv(std::ostream& out, std::span<const TestRecord> records,
                       std::string_view provenance) {
  write_provenance(out, provenance);
  out << kRecordsHeader << '\n';
  for (const auto& r : records) write_record(out, r);
}

std::vector<TestRecord> read_records_csv(std::istream& in) {
  std::vector<TestRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  auto bad = [&](const std::string& what) {
    return Error(ErrorCode::kConfigError,
                 "records line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      if (text != kRecordsHeader) throw bad("unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = csv::split(text);
    if (f.size() != 7) throw bad("expected 7 fields");
    std::int64_t v = 0, khz = 0, rep = 0;
    std::uint64_t n = 0;
    double elapsed = 0.0, joules = 0.0;
    if (!csv::parse_int64(f[0], v) || !csv::parse_int64(f[1], khz) ||
        !csv::parse_uint64(f[2], n) || !csv::parse_int64(f[3], rep) ||
        !csv::parse_double(f[5], elapsed) || !csv::parse_double(f[6], joules)) {
      throw bad("non-numeric field");
    }
    Outcome outcome;
    if (f[4] == "correct") {
      outcome = Outcome::kCorrect;
    } else if (f[4] == "error") {
      outcome = Outcome::kError;
    } else if (f[4] == "lockup") {
      outcome = Outcome::kLockup;
    } else {
      throw bad("unknown outcome");
    }
    records.push_back({OperatingPoint(static_cast<int>(v), khz), n,
                       static_cast<int>(rep), outcome, elapsed, joules});
  }
  if (!header_seen) throw bad("missing header");
  return records;
}

void write_summary_csv(std::ostream& out, const FailureSummary& summary,
                       const GuardbandTable& table,
                       std::string_view provenance) {
  write_provenance(out, provenance);
  out << "voltage_mv,guardband_khz,n_records,n_errors,n_lockups,"
         "first_error_khz,first_lockup_khz,"
         "error_p5_khz,error_p25_khz,error_p50_khz,error_p75_khz,error_p95_khz,"
         "lockup_p5_khz,lockup_p25_khz,lockup_p50_khz,lockup_p75_khz,"
         "lockup_p95_khz,error_onset_p50_khz,lockup_onset_p50_khz\n";
  auto opt = [&](const std::optional<std::int64_t>& v) {
    if (v) {
      out << *v;
    } else {
      out << "NA";
    }
  };
  auto quant = [&](const std::optional<Quantiles>& q) {
    if (q) {
      out << q->p5 << ',' << q->p25 << ',' << q->p50 << ',' << q->p75 << ','
          << q->p95;
    } else {
      out << "NA,NA,NA,NA,NA";
    }
  };
  for (const auto& v : summary.voltages) {
    out << v.voltage_mv << ','
        << table.max_freq_khz(v.voltage_mv, ClockDomain::kCluster) << ','
        << v.n_records << ',' << v.n_errors << ',' << v.n_lockups << ',';
    opt(v.first_error_khz);
    out << ',';
    opt(v.first_lockup_khz);
    out << ',';
    quant(v.error_khz);
    out << ',';
    quant(v.lockup_khz);
    out << ',';
    opt(v.error_onset_khz ? std::optional(v.error_onset_khz->p50) : std::nullopt);
    out << ',';
    opt(v.lockup_onset_khz ? std::optional(v.lockup_onset_khz->p50)
                           : std::nullopt);
    out << '\n';
  }
}

CsvRecordSink::CsvRecordSink(std::ostream& out, std::string_view provenance)
    : out_(out) {
  write_provenance(out_, provenance);
  out_ << kRecordsHeader << '\n';
}

void CsvRecordSink::append(std::span<const TestRecord> records) {
  for (const auto& r : records) write_record(out_, r);
  out_.flush();
}

}  // namespace gbx
