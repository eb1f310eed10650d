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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "gbx/calibration.hpp"
#include "gbx/error.hpp"
#include "gbx/seeding.hpp"
#include "support/fake_backends.hpp"
#include "support/oracles.hpp"

namespace gbx {
namespace {

using fakes::Verdict;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no gbx::Error thrown";
  return ErrorCode::kConfigError;
}

SweepPlan small_plan() {
  SweepPlan plan;
  plan.voltages_mv = {1000, 1200};
  plan.start_freq_khz = 200'000;
  plan.sizes = {50'000, 100'000};
  plan.repetitions = 2;
  plan.stop_rule = StopRule::fixed_ceiling(206'000);
  return plan;
}

TestRecord record(int mv, std::int64_t khz, Outcome o, std::uint64_t n = 50'000,
                  int rep = 0) {
  return {OperatingPoint(mv, khz), n, rep, o, 0.01, 0.001};
}

TEST(Plan, Enumeration) {
  SweepPlan plan;
  plan.voltages_mv = {1000};
  plan.stop_rule = StopRule::fixed_ceiling(204'000);
  const auto points = enumerate_plan(plan);
  EXPECT_EQ(points.size(), 3u * 20 * 10);
  EXPECT_EQ(default_sizes().size(), 20u);
  EXPECT_EQ(default_sizes().front(), 50'000u);
  EXPECT_EQ(default_sizes().back(), 1'000'000u);
  EXPECT_TRUE(std::is_sorted(points.begin(), points.end(), [](auto& a, auto& b) {
    return std::tie(a.voltage_mv, a.freq_khz, a.n_items, a.repetition) <
           std::tie(b.voltage_mv, b.freq_khz, b.n_items, b.repetition);
  }));
  plan.stop_rule = StopRule::fixed_ceiling(300'000);
  EXPECT_EQ(plan.frequencies()[6], 212'000);
}

TEST(Plan, Validation) {
  SweepPlan plan = small_plan();
  plan.sizes.clear();
  EXPECT_EQ(code_of([&] { enumerate_plan(plan); }), ErrorCode::kEmptyPlan);
  plan = small_plan();
  plan.freq_step_khz = 0;
  EXPECT_EQ(code_of([&] { plan.validate(); }), ErrorCode::kInvalidArgument);
  plan = small_plan();
  plan.voltages_mv = {1025};
  EXPECT_EQ(code_of([&] { plan.validate(); }), ErrorCode::kUnsupportedVoltage);
  plan = small_plan();
  plan.stop_rule = StopRule::fixed_ceiling(100'000);
  EXPECT_EQ(code_of([&] { plan.validate(); }), ErrorCode::kEmptyPlan);
}

TEST(Execute, NeverFailingModelFillsGrid) {
  SimulatedBackend backend(fakes::never_failing_params());
  const auto plan = small_plan();
  const auto records = execute_plan(backend, plan, 3);
  EXPECT_EQ(records.size(), enumerate_plan(plan).size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].outcome, Outcome::kCorrect);
  }
  EXPECT_EQ(code_of([&] { summarize(records); }),
            ErrorCode::kNoFailuresObserved);
  const auto s = summarize(records, true);
  EXPECT_FALSE(s.any_failures());
  EXPECT_FALSE(s.at(1000)->first_error_khz.has_value());
}

TEST(Execute, StopOnFirstLockupTruncatesEachVoltage) {
  fakes::ScriptedBackend backend([](const RunRequest& req) {
    const auto limit = req.op.voltage_mv() == 1000 ? 220'000 : 230'000;
    return req.op.freq_khz() >= limit ? Verdict::kLockup : Verdict::kCorrect;
  });
  SweepPlan plan = small_plan();
  plan.stop_rule = StopRule::stop_on_first_lockup();
  const auto records = execute_plan(backend, plan, 1);
  std::map<int, std::int64_t> highest;
  std::map<int, int> lockups;
  for (const auto& r : records) {
    auto& h = highest[r.op.voltage_mv()];
    h = std::max(h, r.op.freq_khz());
    lockups[r.op.voltage_mv()] += r.outcome == Outcome::kLockup;
  }
  EXPECT_EQ(highest[1000], 220'000);
  EXPECT_EQ(highest[1200], 230'000);
  EXPECT_EQ(lockups[1000], 1);
  EXPECT_EQ(lockups[1200], 1);
  // The lockup is the last record of its voltage.
  EXPECT_EQ(records.back().outcome, Outcome::kLockup);
  EXPECT_EQ(records.size(), 2u * (10 * 4 + 1) + 5 * 4);
}

TEST(Execute, ClassificationSoundness) {
  SimulatedBackend backend(default_calibrated_params());
  SweepPlan plan;
  plan.voltages_mv = {1000, 1200};
  plan.start_freq_khz = 210'000;
  plan.sizes = {1'000, 2'000};
  plan.repetitions = 3;
  plan.stop_rule = StopRule::fixed_ceiling(350'000);
  const auto records = execute_plan(backend, plan, 5);
  std::size_t errors = 0, lockups = 0;
  for (const auto& r : records) {
    const auto req = make_run_request(r.op, PrngSpec{plan.workload_seed, r.n_items},
                                      140, plan.timeout_factor);
    if (r.outcome == Outcome::kLockup) {
      ++lockups;
      EXPECT_DOUBLE_EQ(r.elapsed_s, req.timeout_s);
    } else {
      EXPECT_DOUBLE_EQ(r.elapsed_s, workload_duration(req.spec, r.op, 140));
    }
    if (r.outcome == Outcome::kError) {
      ++errors;
      const auto seed = derive_run_seed(5, r.op.voltage_mv(), r.op.freq_khz(),
                                        r.n_items,
                                        static_cast<std::uint64_t>(r.repetition));
      const auto resp = simulated_run(default_calibrated_params(), req, seed);
      EXPECT_NE(resp.value, golden_value(req.spec));
    }
    EXPECT_NEAR(r.energy_j,
                power(default_calibrated_params(), r.op, 2) * r.elapsed_s,
                1e-15);
  }
  EXPECT_GT(errors, 0u);
  EXPECT_GT(lockups, 0u);
}

TEST(Execute, ReplayableAcrossWorkerCounts) {
  SimulatedBackend backend(default_calibrated_params());
  SweepPlan plan;
  plan.start_freq_khz = 210'000;
  plan.sizes = {50'000, 60'000};
  plan.repetitions = 2;
  plan.stop_rule = StopRule::fixed_ceiling(350'000);
  std::string reference;
  for (unsigned workers : {1u, 2u, 3u, 8u}) {
    std::ostringstream streamed;
    CsvRecordSink sink(streamed, "replay");
    const auto records = execute_plan(backend, plan, 21, {workers, &sink});
    std::ostringstream batch;
    write_records_csv(batch, records, "replay");
    EXPECT_EQ(streamed.str(), batch.str());
    if (reference.empty()) reference = batch.str();
    EXPECT_EQ(batch.str(), reference) << workers;
  }
  plan.stop_rule = StopRule::stop_on_first_lockup();
  std::ostringstream one, many;
  write_records_csv(one, execute_plan(backend, plan, 4, {1, nullptr}));
  write_records_csv(many, execute_plan(backend, plan, 4, {5, nullptr}));
  EXPECT_EQ(one.str(), many.str());
}

TEST(Execute, BackendFailureFlushesPartialRecords) {
  fakes::FailingBackend backend(default_calibrated_params(), 7);
  std::ostringstream out;
  CsvRecordSink sink(out, "");
  EXPECT_EQ(code_of([&] { execute_plan(backend, small_plan(), 1, {4, &sink}); }),
            ErrorCode::kBackendFailure);
  std::istringstream in(out.str());
  EXPECT_EQ(read_records_csv(in).size(), 6u);
}

TEST(Execute, CalibratedFirstErrorAt1000mV) {
  SimulatedBackend backend(default_calibrated_params());
  SweepPlan plan;
  plan.voltages_mv = {1000};
  plan.sizes = {50'000, 300'000, 550'000, 800'000, 1'000'000};
  plan.repetitions = 5;
  plan.stop_rule = StopRule::fixed_ceiling(240'000);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = summarize(execute_plan(backend, plan, seed));
    ASSERT_TRUE(s.at(1000)->first_error_khz);
    EXPECT_NEAR(static_cast<double>(*s.at(1000)->first_error_khz), 217'500, 6'000);
    ASSERT_TRUE(s.at(1000)->error_khz);
    EXPECT_LT(s.at(1000)->error_khz->p95 - s.at(1000)->error_khz->p5, 20'000);
  }
}

TEST(Summary, NearestRankQuantiles) {
  const std::vector<TestRecord> one{record(1000, 230'000, Outcome::kError)};
  const auto q = *summarize(one).at(1000)->error_khz;
  EXPECT_EQ(q, (Quantiles{230'000, 230'000, 230'000, 230'000, 230'000}));

  const std::vector<TestRecord> three{record(1000, 220'000, Outcome::kError),
                                      record(1000, 224'000, Outcome::kError, 100'000),
                                      record(1000, 228'000, Outcome::kError, 150'000)};
  EXPECT_EQ(summarize(three).at(1000)->error_khz->p50, 224'000);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> v(1 + rng() % 40);
    for (auto& x : v) x = static_cast<std::int64_t>(rng() % 1000) * 2'000;
    const auto qs = quantiles(v);
    EXPECT_EQ(qs.p5, oracle::nearest_rank(v, 5));
    EXPECT_EQ(qs.p25, oracle::nearest_rank(v, 25));
    EXPECT_EQ(qs.p50, oracle::nearest_rank(v, 50));
    EXPECT_EQ(qs.p75, oracle::nearest_rank(v, 75));
    EXPECT_EQ(qs.p95, oracle::nearest_rank(v, 95));
    EXPECT_LE(qs.p5, qs.p25);
    EXPECT_LE(qs.p25, qs.p50);
    EXPECT_LE(qs.p50, qs.p75);
    EXPECT_LE(qs.p75, qs.p95);
  }
}

TEST(Summary, SeriesOnsetsAndFirstOccurrences) {
  const std::vector<TestRecord> recs{
      record(1100, 210'000, Outcome::kCorrect, 50'000, 0),
      record(1100, 212'000, Outcome::kError, 50'000, 0),
      record(1100, 214'000, Outcome::kError, 50'000, 0),
      record(1100, 216'000, Outcome::kLockup, 50'000, 0),
      record(1100, 214'000, Outcome::kLockup, 50'000, 1),
      record(1100, 218'000, Outcome::kError, 50'000, 1),
  };
  const auto s = summarize(recs);
  const auto* v = s.at(1100);
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(v->n_records, 6u);
  EXPECT_EQ(v->n_errors, 3u);
  EXPECT_EQ(v->n_lockups, 2u);
  EXPECT_EQ(v->first_error_khz, 212'000);
  EXPECT_EQ(v->first_lockup_khz, 214'000);
  EXPECT_EQ(v->error_onset_khz->p95, 218'000);
  EXPECT_EQ(v->error_onset_khz->p5, 212'000);
  EXPECT_EQ(v->lockup_onset_khz->p50, 214'000);
  EXPECT_EQ(s.at(1000), nullptr);
  EXPECT_EQ(code_of([] { summarize({}); }), ErrorCode::kNoRecords);
}

TEST(SizeIndependence, PassesOnPerAttemptModel) {
  SimulatedBackend backend(default_calibrated_params());
  SweepPlan plan;
  plan.voltages_mv = {1000};
  plan.start_freq_khz = 212'000;
  plan.sizes = {50'000, 300'000, 550'000, 800'000, 1'000'000};
  plan.repetitions = 20;
  plan.stop_rule = StopRule::fixed_ceiling(222'000);
  const auto records = execute_plan(backend, plan, 2);
  const auto si = size_independence_test(records);
  EXPECT_TRUE(si.pass) << si.effect;
  ASSERT_EQ(si.rates.size(), 5u);

  std::vector<double> x, y;
  for (const auto& r : si.rates) {
    x.push_back(static_cast<double>(r.n_items));
    y.push_back(r.rate);
  }
  EXPECT_NEAR(si.slope_per_item, oracle::ols_slope(x, y), 1e-15);
  EXPECT_NEAR(si.effect, si.slope_per_item * 950'000, 1e-12);
}

TEST(SizeIndependence, FailsOnPerCycleModel) {
  fakes::PerCycleBackend backend(default_calibrated_params());
  SweepPlan plan;
  plan.voltages_mv = {1000};
  plan.start_freq_khz = 212'000;
  plan.sizes = {50'000, 300'000, 550'000, 800'000, 1'000'000};
  plan.repetitions = 20;
  plan.stop_rule = StopRule::fixed_ceiling(222'000);
  const auto si = size_independence_test(execute_plan(backend, plan, 2));
  EXPECT_FALSE(si.pass) << si.effect;
  EXPECT_GT(si.effect, 0.05);
}

TEST(SizeIndependence, InsufficientData) {
  std::vector<TestRecord> correct{record(1000, 200'000, Outcome::kCorrect)};
  EXPECT_EQ(code_of([&] { size_independence_test(correct); }),
            ErrorCode::kInsufficientData);
  std::vector<TestRecord> four_sizes;
  for (std::uint64_t n = 1; n <= 4; ++n) {
    four_sizes.push_back(record(1000, 200'000, Outcome::kError, n));
  }
  EXPECT_EQ(code_of([&] { size_independence_test(four_sizes); }),
            ErrorCode::kInsufficientData);
}

TEST(Csv, RecordsRoundTripAndSummarySchema) {
  SimulatedBackend backend(default_calibrated_params());
  SweepPlan plan = small_plan();
  plan.start_freq_khz = 216'000;
  plan.stop_rule = StopRule::fixed_ceiling(222'000);
  const auto records = execute_plan(backend, plan, 8);
  std::ostringstream out;
  write_records_csv(out, records, "gbx test");
  EXPECT_EQ(out.str().substr(0, out.str().find('\n', 11) + 1),
            "# gbx test\nvoltage_mv,freq_khz,n_items,rep,outcome,elapsed_s,"
            "energy_j\n");
  std::istringstream in(out.str());
  EXPECT_EQ(read_records_csv(in), records);

  std::ostringstream summary;
  write_summary_csv(summary, summarize(records, true), GuardbandTable::gap8());
  std::istringstream lines(summary.str());
  std::string header, row1, row2;
  std::getline(lines, header);
  std::getline(lines, row1);
  std::getline(lines, row2);
  EXPECT_EQ(header.rfind("voltage_mv,guardband_khz,", 0), 0u);
  EXPECT_EQ(row1.rfind("1000,87000,", 0), 0u);
  EXPECT_NE(row2.find("NA"), std::string::npos);  // 1200 mV never fails here
}

}  // namespace
}  // namespace gbx
