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

#include "support/fake_backends.hpp"

#include <cmath>

#include "gbx/calibration.hpp"
#include "gbx/error.hpp"
#include "gbx/seeding.hpp"

namespace gbx::fakes {

RunResponse PerCycleBackend::run(const RunRequest& req, std::uint64_t rng_seed) {
  const auto probs = outcome_probabilities(params_, req.op);
  const double blocks = static_cast<double>(req.spec.n_items) / 50'000.0;
  const double p_error = 1.0 - std::pow(1.0 - probs.p_error, blocks);

  UnitStream rng(rng_seed);
  const double u_lock = rng.next();
  const double u_err = rng.next();
  RunResponse resp;
  resp.avg_power_w = power(params_, req.op, kSingleCoreRunCores);
  if (u_lock < probs.p_lockup) {
    resp.status = RunStatus::kTimeout;
    resp.elapsed_s = req.timeout_s;
    return resp;
  }
  resp.elapsed_s = workload_duration(req.spec, req.op, params_.cycles_per_item);
  resp.value = golden_.golden_value(req.spec);
  if (u_err < p_error) resp.value ^= 1;
  return resp;
}

RunResponse ScriptedBackend::run(const RunRequest& req, std::uint64_t) {
  ++calls_;
  RunResponse resp;
  resp.avg_power_w = 0.01;
  switch (script_(req)) {
    case Verdict::kLockup:
      resp.status = RunStatus::kTimeout;
      resp.elapsed_s = req.timeout_s;
      return resp;
    case Verdict::kError:
      resp.value = golden_.golden_value(req.spec) ^ 0x10;
      break;
    case Verdict::kCorrect:
      resp.value = golden_.golden_value(req.spec);
      break;
  }
  resp.elapsed_s =
      workload_duration(req.spec, req.op, kDefaultCyclesPerItem);
  return resp;
}

ParallelRunResponse ScriptedBackend::run_parallel(const ParallelRunRequest& req,
                                                  std::uint64_t) {
  ++calls_;
  const RunRequest probe{req.op, PrngSpec{1, 1}, req.timeout_s};
  ParallelRunResponse resp;
  resp.avg_power_w = 0.01;
  resp.elapsed_s = workload_duration(req.workload, req.op);
  switch (script_(probe)) {
    case Verdict::kLockup:
      resp.status = RunStatus::kTimeout;
      resp.error_free = false;
      resp.elapsed_s = req.timeout_s;
      break;
    case Verdict::kError:
      resp.error_free = false;
      break;
    case Verdict::kCorrect:
      break;
  }
  return resp;
}

RunResponse FailingBackend::run(const RunRequest& req, std::uint64_t rng_seed) {
  if (++calls_ == fail_on_call_) {
    throw Error(ErrorCode::kBackendFailure, "serial link dropped");
  }
  return simulated_run(params_, req, rng_seed);
}

DeviceModelParams never_failing_params() {
  DeviceModelParams p = default_calibrated_params();
  p.k_err *= 100.0;
  p.k_lock *= 100.0;
  return p;
}

}  // namespace gbx::fakes
