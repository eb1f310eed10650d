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

#include "gbx/host_backend.hpp"

#include <chrono>
#include <utility>

#include "gbx/error.hpp"
#include "gbx/seeding.hpp"

namespace gbx {

Clock steady_clock_seconds() {
  return [] {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  };
}

HostBackend::HostBackend(ByteChannel& channel, Clock clock, PowerProbe probe,
                         HostBackendOptions options)
    : channel_(channel),
      clock_(std::move(clock)),
      probe_(std::move(probe)),
      options_(options) {}

std::optional<wire::Response> HostBackend::exchange(const wire::Command& command,
                                                    double timeout_s) {
  channel_.write(wire::encode(command));
  const double deadline = clock_() + timeout_s;
  while (frames_.empty()) {
    const double remaining = deadline - clock_();
    if (remaining <= 0.0) return std::nullopt;
    const std::string bytes = channel_.read_some(remaining);
    if (bytes.empty()) return std::nullopt;
    try {
      for (auto& f : framer_.feed(bytes)) frames_.push_back(std::move(f));
    } catch (const MalformedFrame& e) {
      throw Error(ErrorCode::kBackendFailure, e.what());
    }
  }
  const std::string frame = std::move(frames_.front());
  frames_.pop_front();
  try {
    return wire::decode_response(frame);
  } catch (const MalformedFrame& e) {
    throw Error(ErrorCode::kBackendFailure, e.what());
  }
}

void HostBackend::expect_ok(const wire::Command& command) {
  const auto resp = exchange(command, options_.command_timeout_s);
  if (!resp) {
    throw Error(ErrorCode::kBackendFailure,
                "no response to " + wire::encode(command));
  }
  if (const auto* err = std::get_if<wire::DeviceError>(&*resp)) {
    throw Error(ErrorCode::kBackendFailure,
                "device error " + std::to_string(err->code));
  }
  if (!std::holds_alternative<wire::Ok>(*resp)) {
    throw Error(ErrorCode::kBackendFailure, "unexpected response");
  }
}

RunResponse HostBackend::run(const RunRequest& req, std::uint64_t) {
  expect_ok(wire::SetVoltage{static_cast<std::uint32_t>(req.op.voltage_mv())});
  expect_ok(wire::SetFrequency{static_cast<std::uint64_t>(req.op.freq_khz())});

  const double start = clock_();
  const auto resp =
      exchange(wire::Run{req.spec.seed, req.spec.n_items, 1}, req.timeout_s);
  RunResponse out;
  if (!resp) {
    out.status = RunStatus::kTimeout;
    out.elapsed_s = req.timeout_s;
    out.avg_power_w = probe_ ? probe_() : 0.0;
    // Stale bytes from the hung run must not leak into the next exchange.
    frames_.clear();
    framer_ = wire::LineFramer{};
    const auto reset = exchange(wire::Reset{}, options_.reset_timeout_s);
    if (!reset || !std::holds_alternative<wire::Ok>(*reset)) {
      throw Error(ErrorCode::kBackendFailure, "device did not recover after RST");
    }
    return out;
  }
  if (const auto* err = std::get_if<wire::DeviceError>(&*resp)) {
    throw Error(ErrorCode::kBackendFailure,
                "device error " + std::to_string(err->code));
  }
  const auto* val = std::get_if<wire::Value>(&*resp);
  if (val == nullptr) {
    throw Error(ErrorCode::kBackendFailure, "RUN answered without a value");
  }
  out.status = RunStatus::kValue;
  out.value = val->value;
  out.elapsed_s = clock_() - start;
  out.avg_power_w = probe_ ? probe_() : 0.0;
  return out;
}

LoopbackDevice::LoopbackDevice(DeviceModelParams params, ManualClock& clock,
                               std::uint64_t device_seed)
    : params_(std::move(params)), clock_(clock), device_seed_(device_seed) {
  params_.validate();
}

void LoopbackDevice::write(std::string_view bytes) {
  for (const auto& frame : framer_.feed(bytes)) handle(frame);
}

std::string LoopbackDevice::read_some(double timeout_s) {
  if (outbox_.empty()) {
    clock_.advance(timeout_s);
    return {};
  }
  return std::exchange(outbox_, {});
}

void LoopbackDevice::reply(const wire::Response& response) {
  outbox_ += wire::encode(response);
}

void LoopbackDevice::handle(const std::string& frame) {
  wire::Command command;
  try {
    command = wire::decode_command(frame);
  } catch (const MalformedFrame&) {
    if (!locked_) reply(wire::DeviceError{wire::kErrUnknownCommand});
    return;
  }
  if (std::holds_alternative<wire::Reset>(command)) {
    locked_ = false;
    reply(wire::Ok{});
    return;
  }
  if (locked_) return;

  if (const auto* v = std::get_if<wire::SetVoltage>(&command)) {
    if (!is_supply_step(static_cast<int>(v->mv))) {
      reply(wire::DeviceError{wire::kErrBadArgument});
      return;
    }
    voltage_mv_ = v->mv;
    reply(wire::Ok{});
  } else if (const auto* f = std::get_if<wire::SetFrequency>(&command)) {
    if (f->khz == 0) {
      reply(wire::DeviceError{wire::kErrBadArgument});
      return;
    }
    freq_khz_ = f->khz;
    reply(wire::Ok{});
  } else if (const auto* r = std::get_if<wire::Run>(&command)) {
    if (!voltage_mv_ || !freq_khz_) {
      reply(wire::DeviceError{wire::kErrNotConfigured});
      return;
    }
    if (r->seed == 0 || r->n_items == 0 || r->repetitions == 0) {
      reply(wire::DeviceError{wire::kErrBadArgument});
      return;
    }
    const OperatingPoint op(static_cast<int>(*voltage_mv_),
                            static_cast<std::int64_t>(*freq_khz_));
    const PrngSpec spec{r->seed, r->n_items};
    const auto req = make_run_request(op, spec, params_.cycles_per_item);
    std::uint64_t last = 0;
    for (std::uint64_t rep = 0; rep < r->repetitions; ++rep) {
      const auto seed = derive_run_seed(device_seed_, op.voltage_mv(),
                                        op.freq_khz(), spec.n_items, runs_++);
      const auto resp = simulated_run(params_, req, seed, golden_);
      last_power_w_ = resp.avg_power_w;
      if (resp.timed_out()) {
        locked_ = true;
        return;
      }
      clock_.advance(resp.elapsed_s);
      last = resp.value;
    }
    reply(wire::Value{last});
  }
}

}  // namespace gbx
