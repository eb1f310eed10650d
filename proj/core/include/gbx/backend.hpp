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

#ifndef GBX_BACKEND_HPP_
#define GBX_BACKEND_HPP_

#include <cstdint>
#include <memory>

#include "gbx/device_model.hpp"
#include "gbx/guardband.hpp"
#include "gbx/prng.hpp"
#include "gbx/workload.hpp"

namespace gbx {

inline constexpr double kDefaultTimeoutFactor = 3.0;
// Cluster core running the workload plus the FC orchestrating it.
inline constexpr int kSingleCoreRunCores = 2;

struct RunRequest {
  OperatingPoint op;
  PrngSpec spec;
  double timeout_s;
};

// timeout = factor * expected duration at op.
RunRequest make_run_request(const OperatingPoint& op, const PrngSpec& spec,
                            double cycles_per_item,
                            double timeout_factor = kDefaultTimeoutFactor);

enum class RunStatus { kValue, kTimeout };

struct RunResponse {
  RunStatus status = RunStatus::kValue;
  std::uint64_t value = 0;  // meaningful for kValue only
  double elapsed_s = 0.0;   // equals the request timeout for kTimeout
  double avg_power_w = 0.0;

  bool timed_out() const noexcept { return status == RunStatus::kTimeout; }

  friend bool operator==(const RunResponse&, const RunResponse&) = default;
};

struct ParallelRunRequest {
  OperatingPoint op;
  ParallelWorkloadSpec workload;
  double timeout_s;
};

ParallelRunRequest make_parallel_request(
    const OperatingPoint& op, const ParallelWorkloadSpec& workload,
    double timeout_factor = kDefaultTimeoutFactor);

struct ParallelRunResponse {
  RunStatus status = RunStatus::kValue;
  bool error_free = true;
  double elapsed_s = 0.0;
  double avg_power_w = 0.0;

  friend bool operator==(const ParallelRunResponse&,
                         const ParallelRunResponse&) = default;
};

// Execution target for campaigns. Implementations other than the simulator
// drive real (or fake) hardware over the wire protocol.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual RunResponse run(const RunRequest& req, std::uint64_t rng_seed) = 0;

  // Throws Error(kBackendFailure) unless overridden.
  virtual ParallelRunResponse run_parallel(const ParallelRunRequest& req,
                                           std::uint64_t rng_seed);

  // Whether run() may be called from several threads at once.
  virtual bool concurrent() const noexcept = 0;

  virtual double cycles_per_item() const noexcept = 0;
};

// Pure function of its arguments. Samples lockup first (p_lockup -> Timeout
// at timeout_s), then error (p_error -> one injected bit flip), otherwise
// returns the golden value.
RunResponse simulated_run(const DeviceModelParams& params,
                          const RunRequest& req, std::uint64_t rng_seed,
                          GoldenCache& golden);
RunResponse simulated_run(const DeviceModelParams& params,
                          const RunRequest& req, std::uint64_t rng_seed);

// Workload cores plus the FC are active for power accounting.
ParallelRunResponse simulated_parallel_run(const DeviceModelParams& params,
                                           const ParallelRunRequest& req,
                                           std::uint64_t rng_seed);

class SimulatedBackend final : public Backend {
 public:
  explicit SimulatedBackend(
      DeviceModelParams params,
      std::shared_ptr<GoldenCache> golden = std::make_shared<GoldenCache>());

  RunResponse run(const RunRequest& req, std::uint64_t rng_seed) override;
  ParallelRunResponse run_parallel(const ParallelRunRequest& req,
                                   std::uint64_t rng_seed) override;
  bool concurrent() const noexcept override { return true; }
  double cycles_per_item() const noexcept override {
    return params_.cycles_per_item;
  }

  const DeviceModelParams& params() const noexcept { return params_; }

 private:
  DeviceModelParams params_;
  std::shared_ptr<GoldenCache> golden_;
};

}  // namespace gbx

#endif  // GBX_BACKEND_HPP_
