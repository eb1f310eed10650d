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

#include "gbx/workload.hpp"

#include <gtest/gtest.h>

#include <set>

#include "gbx/error.hpp"
#include "gbx/seeding.hpp"
#include "support/oracles.hpp"

namespace gbx {
namespace {

TEST(WorkloadDuration, AnchorAndScaling) {
  EXPECT_DOUBLE_EQ(kDefaultCyclesPerItem, 140.0);
  EXPECT_NEAR(workload_duration(PrngSpec{1, 50'000}, OperatingPoint(1000, 200'000),
                                kDefaultCyclesPerItem),
              0.035, 1e-15);
  const PrngSpec spec{1, 300'000};
  EXPECT_NEAR(
      workload_duration(spec, OperatingPoint(1100, 100'000), 140) /
          workload_duration(spec, OperatingPoint(1100, 200'000), 140),
      2.0, 1e-12);
  EXPECT_NEAR(workload_duration(PrngSpec{1, 1'000'000}, OperatingPoint(1200, 400'000), 140),
              workload_duration(PrngSpec{1, 50'000}, OperatingPoint(1200, 20'000), 140),
              1e-12);
}

TEST(WorkloadDuration, Parallel) {
  const ParallelWorkloadSpec w{8, 100'000'000, "decoder"};
  EXPECT_DOUBLE_EQ(workload_duration(w, OperatingPoint(1000, 200'000)), 0.5);
  EXPECT_THROW(workload_duration(ParallelWorkloadSpec{9, 10, "x"},
                                 OperatingPoint(1000, 200'000)),
               Error);
  EXPECT_THROW(workload_duration(ParallelWorkloadSpec{8, 0, "x"},
                                 OperatingPoint(1000, 200'000)),
               Error);
}

TEST(Seeding, SplitmixReferenceVector) {
  // First output of the splitmix64 stream seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  for (std::uint64_t x : {1ULL, 42ULL, ~0ULL}) {
    EXPECT_EQ(splitmix64(x), oracle::splitmix64(x));
  }
}

TEST(Seeding, RunSeedIsAPureHashOfCoordinates) {
  auto chain = [](std::uint64_t c, int v, std::int64_t f, std::uint64_t n,
                  std::uint64_t r) {
    std::uint64_t h = oracle::splitmix64(c);
    h = oracle::splitmix64(h ^ static_cast<std::uint64_t>(v));
    h = oracle::splitmix64(h ^ static_cast<std::uint64_t>(f));
    h = oracle::splitmix64(h ^ n);
    return oracle::splitmix64(h ^ r);
  };
  EXPECT_EQ(derive_run_seed(1, 1000, 200'000, 50'000, 3),
            chain(1, 1000, 200'000, 50'000, 3));
  std::set<std::uint64_t> seeds;
  for (int r = 0; r < 10; ++r) {
    for (std::uint64_t n = 50'000; n <= 200'000; n += 50'000) {
      seeds.insert(derive_run_seed(9, 1100, 250'000, n, static_cast<std::uint64_t>(r)));
    }
  }
  EXPECT_EQ(seeds.size(), 40u);
}

TEST(Seeding, UnitStreamRangeAndDeterminism) {
  UnitStream a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.next();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, b.next());
  }
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(a.below(7), 7u);
  }
}

}  // namespace
}  // namespace gbx
