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

#ifndef GBX_HOST_BACKEND_HPP_
#define GBX_HOST_BACKEND_HPP_

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "gbx/backend.hpp"
#include "gbx/protocol.hpp"

namespace gbx {

// Byte transport to a device (serial line in production).
class ByteChannel {
 public:
  virtual ~ByteChannel() = default;

  virtual void write(std::string_view bytes) = 0;

  // Blocks for up to timeout_s and returns whatever arrived; an empty
  // string means nothing arrived within the timeout.
  virtual std::string read_some(double timeout_s) = 0;
};

// Seconds since an arbitrary epoch.
using Clock = std::function<double()>;
Clock steady_clock_seconds();

// Average power of the run that just finished (e.g. from a power trace).
using PowerProbe = std::function<double()>;

struct HostBackendOptions {
  double cycles_per_item = kDefaultCyclesPerItem;
  double reset_timeout_s = 1.0;
  double command_timeout_s = 1.0;
};

// Drives a device over the line protocol. Strictly sequential.
class HostBackend final : public Backend {
 public:
  HostBackend(ByteChannel& channel, Clock clock, PowerProbe probe,
              HostBackendOptions options = {});

  // rng_seed is ignored: outcomes come from the device.
  RunResponse run(const RunRequest& req, std::uint64_t rng_seed) override;
  bool concurrent() const noexcept override { return false; }
  double cycles_per_item() const noexcept override {
    return options_.cycles_per_item;
  }

 private:
  std::optional<wire::Response> exchange(const wire::Command& command,
                                         double timeout_s);
  void expect_ok(const wire::Command& command);

  ByteChannel& channel_;
  Clock clock_;
  PowerProbe probe_;
  HostBackendOptions options_;
  wire::LineFramer framer_;
  std::deque<std::string> frames_;
};

// Manually advanced clock for simulated transports.
class ManualClock {
 public:
  double now() const noexcept { return now_s_; }
  void advance(double seconds) noexcept { now_s_ += seconds; }
  Clock as_clock() {
    return [this] { return now_s_; };
  }

 private:
  double now_s_ = 0.0;
};

// In-process fake device backed by the device model. It answers frames
// written to it, advances the shared clock by simulated execution time, and
// goes silent after a sampled lockup until it receives RST.
class LoopbackDevice final : public ByteChannel {
 public:
  LoopbackDevice(DeviceModelParams params, ManualClock& clock,
                 std::uint64_t device_seed);

  void write(std::string_view bytes) override;
  std::string read_some(double timeout_s) override;

  bool locked() const noexcept { return locked_; }
  double last_power_w() const noexcept { return last_power_w_; }
  std::uint64_t runs_executed() const noexcept { return runs_; }

 private:
  void handle(const std::string& frame);
  void reply(const wire::Response& response);

  DeviceModelParams params_;
  ManualClock& clock_;
  std::uint64_t device_seed_;
  GoldenCache golden_;
  wire::LineFramer framer_;
  std::string outbox_;
  std::optional<std::uint32_t> voltage_mv_;
  std::optional<std::uint64_t> freq_khz_;
  bool locked_ = false;
  double last_power_w_ = 0.0;
  std::uint64_t runs_ = 0;
};

}  // namespace gbx

#endif  // GBX_HOST_BACKEND_HPP_
