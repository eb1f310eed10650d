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

#ifndef GBX_SWEEP_HPP_
#define GBX_SWEEP_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gbx/backend.hpp"
#include "gbx/guardband.hpp"

namespace gbx {

enum class StopKind { kStopOnFirstLockup, kFixedCeiling };

// StopOnFirstLockup ends a voltage's sweep at its first lockup (the axis is
// otherwise open up to SweepPlan::freq_limit_khz). FixedCeiling sweeps every
// frequency up to and including ceiling_khz regardless of lockups.
struct StopRule {
  StopKind kind = StopKind::kStopOnFirstLockup;
  std::int64_t ceiling_khz = 0;

  static StopRule stop_on_first_lockup() { return {}; }
  static StopRule fixed_ceiling(std::int64_t khz) {
    return {StopKind::kFixedCeiling, khz};
  }

  friend bool operator==(const StopRule&, const StopRule&) = default;
};

// 50K..1M items in 50K steps.
std::vector<std::uint64_t> default_sizes();

struct SweepPlan {
  std::vector<int> voltages_mv{kSupplyStepsMv.begin(), kSupplyStepsMv.end()};
  std::int64_t start_freq_khz = 200'000;
  std::int64_t freq_step_khz = 2'000;
  std::vector<std::uint64_t> sizes = default_sizes();
  int repetitions = 10;
  StopRule stop_rule;
  // Hard cap for the open-ended axis of StopOnFirstLockup.
  std::int64_t freq_limit_khz = 1'000'000;
  double timeout_factor = kDefaultTimeoutFactor;
  std::uint64_t workload_seed = 0x9E3779B97F4A7C15ULL;

  // Throws Error(kEmptyPlan) for empty grids, Error(kInvalidArgument) or
  // Error(kUnsupportedVoltage) for other violations.
  void validate() const;
  // Frequency axis, ascending.
  std::vector<std::int64_t> frequencies() const;

  friend bool operator==(const SweepPlan&, const SweepPlan&) = default;
};

struct PlanPoint {
  int voltage_mv;
  std::int64_t freq_khz;
  std::uint64_t n_items;
  int repetition;

  friend bool operator==(const PlanPoint&, const PlanPoint&) = default;
};

// Lexicographic (voltage, frequency, size, repetition), voltages in plan
// order. Under StopOnFirstLockup this is the full axis up to
// freq_limit_khz; execution truncates it.
std::vector<PlanPoint> enumerate_plan(const SweepPlan& plan);

enum class Outcome { kCorrect, kError, kLockup };

std::string_view to_string(Outcome outcome) noexcept;

struct TestRecord {
  OperatingPoint op;
  std::uint64_t n_items;
  int repetition;
  Outcome outcome;
  double elapsed_s;
  double energy_j;

  friend bool operator==(const TestRecord&, const TestRecord&) = default;
};

// Receives records in canonical order as soon as they are final.
class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void append(std::span<const TestRecord> records) = 0;
};

struct ExecutionOptions {
  unsigned workers = 0;  // 0: hardware concurrency
  RecordSink* sink = nullptr;
};

// Runs the plan. Voltages execute in parallel when the backend allows it;
// each voltage's points run in plan order. The result is identical for any
// worker count. On backend failure every finished record is handed to the
// sink and Error(kBackendFailure) is thrown.
std::vector<TestRecord> execute_plan(Backend& backend, const SweepPlan& plan,
                                     std::uint64_t campaign_seed,
                                     const ExecutionOptions& options = {});

struct Quantiles {
  std::int64_t p5, p25, p50, p75, p95;

  friend bool operator==(const Quantiles&, const Quantiles&) = default;
};

// Nearest-rank percentile of an ascending sample; pct in (0, 100].
std::int64_t nearest_rank(std::span<const std::int64_t> sorted, double pct);
Quantiles quantiles(std::vector<std::int64_t> values);

struct VoltageFailures {
  int voltage_mv = 0;
  std::size_t n_records = 0;
  std::size_t n_errors = 0;
  std::size_t n_lockups = 0;
  std::optional<std::int64_t> first_error_khz;
  std::optional<std::int64_t> first_lockup_khz;
  // Over every record with that outcome.
  std::optional<Quantiles> error_khz;
  std::optional<Quantiles> lockup_khz;
  // Over per-series onsets, a series being one (size, repetition) pair
  // swept upward in frequency.
  std::optional<Quantiles> error_onset_khz;
  std::optional<Quantiles> lockup_onset_khz;
};

struct FailureSummary {
  std::vector<VoltageFailures> voltages;  // ascending voltage

  bool any_failures() const noexcept;
  const VoltageFailures* at(int voltage_mv) const noexcept;
};

// Throws Error(kNoRecords) for an empty input and, unless
// allow_no_failures, Error(kNoFailuresObserved) when nothing failed.
FailureSummary summarize(std::span<const TestRecord> records,
                         bool allow_no_failures = false);

struct SizeRate {
  std::uint64_t n_items;
  std::size_t runs;
  std::size_t errors;
  double rate;
};

struct SizeIndependence {
  std::vector<SizeRate> rates;
  double slope_per_item = 0.0;
  double effect = 0.0;  // slope * (largest - smallest size)
  double threshold = 0.05;
  bool pass = false;
};

// Error rate per problem size over the (voltage, frequency) points where
// at least one error occurred, with a least-squares slope. Throws
// Error(kInsufficientData) with no errors or fewer than 5 sizes.
SizeIndependence size_independence_test(std::span<const TestRecord> records,
                                        double threshold = 0.05);

// CSV interchange. A non-empty provenance is written first as a '#' line.
void write_records_csv(std::ostream& out, std::span<const TestRecord> records,
                       std::string_view provenance = {});
std::vector<TestRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const FailureSummary& summary,
                       const GuardbandTable& table,
                       std::string_view provenance = {});

// Streams records straight to a CSV writer.
class CsvRecordSink final : public RecordSink {
 public:
  CsvRecordSink(std::ostream& out, std::string_view provenance);
  void append(std::span<const TestRecord> records) override;

 private:
  std::ostream& out_;
};

}  // namespace gbx

#endif  // GBX_SWEEP_HPP_
