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

#include "gbx/csv.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace gbx::csv {
namespace {

TEST(Csv, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = dist(rng) * std::pow(10.0, (i % 21) - 10);
    double back = 0.0;
    ASSERT_TRUE(parse_double(format_double(v), back));
    EXPECT_EQ(back, v);
  }
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(0.25), "0.25");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Csv, SplitKeepsEmptyFields) {
  const auto f = split("a,,b,");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[0], "a");
  EXPECT_EQ(f[1], "");
  EXPECT_EQ(f[2], "b");
  EXPECT_EQ(f[3], "");
  EXPECT_EQ(split("").size(), 1u);
  EXPECT_EQ(split("x;y", ';').size(), 2u);
}

TEST(Csv, StrictParsers) {
  std::int64_t i = 0;
  std::uint64_t u = 0;
  double d = 0.0;
  EXPECT_TRUE(parse_int64("-42", i));
  EXPECT_EQ(i, -42);
  EXPECT_FALSE(parse_int64("42x", i));
  EXPECT_FALSE(parse_int64("", i));
  EXPECT_TRUE(parse_uint64("18446744073709551615", u));
  EXPECT_EQ(u, std::numeric_limits<std::uint64_t>::max());
  EXPECT_FALSE(parse_uint64("-1", u));
  EXPECT_FALSE(parse_uint64("18446744073709551616", u));
  EXPECT_TRUE(parse_double("1e-3", d));
  EXPECT_EQ(d, 1e-3);
  EXPECT_FALSE(parse_double("1.0 ", d));
  EXPECT_EQ(trim(" \tx y\r\n"), "x y");
}

}  // namespace
}  // namespace gbx::csv
