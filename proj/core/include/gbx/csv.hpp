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

#ifndef GBX_CSV_HPP_
#define GBX_CSV_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gbx::csv {

// Shortest round-trip decimal form; identical output for identical doubles.
std::string format_double(double value);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

// Strict parsers; return false on any trailing garbage.
bool parse_double(std::string_view text, double& out);
bool parse_int64(std::string_view text, std::int64_t& out);
bool parse_uint64(std::string_view text, std::uint64_t& out);

std::string_view trim(std::string_view text);

}  // namespace gbx::csv

#endif  // GBX_CSV_HPP_
