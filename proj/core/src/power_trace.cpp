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

#include "gbx/power_trace.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "gbx/csv.hpp"
#include "gbx/error.hpp"

namespace gbx {
namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kMalformedTrace,
              "line " + std::to_string(line) + ": " + what);
}

}  // namespace

PowerTrace read_power_trace_csv(std::istream& in) {
  PowerTrace trace;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      if (text != "timestamp_us,current_ma,bus_mv") {
        malformed(line_no, "expected header timestamp_us,current_ma,bus_mv");
      }
      header_seen = true;
      continue;
    }
    const auto fields = csv::split(text);
    if (fields.size() == 2 && fields[0] == "TRIG") {
      if (fields[1] == "START") {
        if (trace.trigger_start) malformed(line_no, "duplicate TRIG,START");
        trace.trigger_start = trace.samples.size();
      } else if (fields[1] == "END") {
        if (!trace.trigger_start) malformed(line_no, "TRIG,END before TRIG,START");
        if (trace.trigger_end) malformed(line_no, "duplicate TRIG,END");
        trace.trigger_end = trace.samples.size();
      } else {
        malformed(line_no, "unknown trigger marker");
      }
      continue;
    }
    if (fields.size() != 3) malformed(line_no, "expected 3 fields");
    PowerSample s{};
    if (!csv::parse_int64(fields[0], s.timestamp_us)) {
      malformed(line_no, "bad timestamp_us");
    }
    if (!csv::parse_double(fields[1], s.current_ma)) {
      malformed(line_no, "bad current_ma");
    }
    if (fields[2].empty()) {
      s.bus_mv = std::nan("");
    } else if (!csv::parse_double(fields[2], s.bus_mv)) {
      malformed(line_no, "bad bus_mv");
    }
    trace.samples.push_back(s);
  }
  if (!header_seen) malformed(line_no, "missing header");
  return trace;
}

void write_power_trace_csv(std::ostream& out, const PowerTrace& trace) {
  out << "timestamp_us,current_ma,bus_mv\n";
  for (std::size_t i = 0; i <= trace.samples.size(); ++i) {
    if (trace.trigger_start == i) out << "TRIG,START\n";
    if (trace.trigger_end == i) out << "TRIG,END\n";
    if (i == trace.samples.size()) break;
    const auto& s = trace.samples[i];
    out << s.timestamp_us << ',' << csv::format_double(s.current_ma) << ',';
    if (!std::isnan(s.bus_mv)) out << csv::format_double(s.bus_mv);
    out << '\n';
  }
}

double PowerWindowIntegrator::watts(const PowerSample& s) const {
  const double mv = std::isnan(s.bus_mv) ? supply_mv_ : s.bus_mv;
  return (s.current_ma / 1000.0) * (mv / 1000.0);
}

void PowerWindowIntegrator::add(const PowerSample& sample) {
  const double w = watts(sample);
  if (count_ == 0) {
    first_us_ = sample.timestamp_us;
  } else {
    if (sample.timestamp_us <= last_us_) {
      throw Error(ErrorCode::kNonMonotonicTimestamps,
                  "timestamp " + std::to_string(sample.timestamp_us) +
                      " us does not follow " + std::to_string(last_us_) + " us");
    }
    const double dt = static_cast<double>(sample.timestamp_us - last_us_) * 1e-6;
    energy_j_ += 0.5 * (last_w_ + w) * dt;
  }
  last_us_ = sample.timestamp_us;
  last_w_ = w;
  ++count_;
}

double PowerWindowIntegrator::average_w() const {
  if (count_ < 2) {
    throw Error(ErrorCode::kEmptyWindow,
                "trigger window holds " + std::to_string(count_) +
                    " samples, need at least 2");
  }
  return energy_j_ / (static_cast<double>(last_us_ - first_us_) * 1e-6);
}

double ingest_power_trace(const PowerTrace& trace, double shunt_supply_mv) {
  if (!trace.trigger_start || !trace.trigger_end ||
      *trace.trigger_end < *trace.trigger_start ||
      *trace.trigger_end > trace.samples.size()) {
    throw Error(ErrorCode::kEmptyWindow, "trace lacks a valid trigger window");
  }
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    if (trace.samples[i].timestamp_us <= trace.samples[i - 1].timestamp_us) {
      throw Error(ErrorCode::kNonMonotonicTimestamps,
                  "sample " + std::to_string(i) + " is not after its predecessor");
    }
  }
  PowerWindowIntegrator integrator(shunt_supply_mv);
  for (std::size_t i = *trace.trigger_start; i < *trace.trigger_end; ++i) {
    integrator.add(trace.samples[i]);
  }
  return integrator.average_w();
}

}  // namespace gbx
