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

#include <string>
#include <utility>

#include "gbx/backend.hpp"
#include "gbx/error.hpp"
#include "gbx/seeding.hpp"

namespace gbx {
namespace {

void check_timeout(double timeout_s, double expected_s) {
  if (!(timeout_s > expected_s)) {
    throw Error(ErrorCode::kInvalidArgument,
                "timeout " + std::to_string(timeout_s) +
                    " s does not exceed the expected duration " +
                    std::to_string(expected_s) + " s");
  }
}

}  // namespace

RunRequest make_run_request(const OperatingPoint& op, const PrngSpec& spec,
                            double cycles_per_item, double timeout_factor) {
  if (!(timeout_factor > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "timeout factor must exceed 1");
  }
  return {op, spec, timeout_factor * workload_duration(spec, op, cycles_per_item)};
}

ParallelRunRequest make_parallel_request(const OperatingPoint& op,
                                         const ParallelWorkloadSpec& workload,
                                         double timeout_factor) {
  if (!(timeout_factor > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "timeout factor must exceed 1");
  }
  return {op, workload, timeout_factor * workload_duration(workload, op)};
}

ParallelRunResponse Backend::run_parallel(const ParallelRunRequest&,
                                          std::uint64_t) {
  throw Error(ErrorCode::kBackendFailure,
              "backend does not support parallel workloads");
}

RunResponse simulated_run(const DeviceModelParams& params,
                          const RunRequest& req, std::uint64_t rng_seed,
                          GoldenCache& golden) {
  const double duration =
      workload_duration(req.spec, req.op, params.cycles_per_item);
  check_timeout(req.timeout_s, duration);
  const auto probs = outcome_probabilities(params, req.op);
  const double watts = power(params, req.op, kSingleCoreRunCores);

  UnitStream rng(rng_seed);
  const double u_lock = rng.next();
  const double u_err = rng.next();

  RunResponse resp;
  resp.avg_power_w = watts;
  if (u_lock < probs.p_lockup) {
    resp.status = RunStatus::kTimeout;
    resp.elapsed_s = req.timeout_s;
    return resp;
  }
  resp.elapsed_s = duration;
  if (u_err < probs.p_error) {
    const std::uint64_t flip = 1 + rng.below(req.spec.n_items);
    const auto bit = static_cast<unsigned>(rng.below(64));
    resp.value = inject_corruption(req.spec, flip, bit);
  } else {
    resp.value = golden.golden_value(req.spec);
  }
  return resp;
}

RunResponse simulated_run(const DeviceModelParams& params,
                          const RunRequest& req, std::uint64_t rng_seed) {
  GoldenCache local;
  return simulated_run(params, req, rng_seed, local);
}

ParallelRunResponse simulated_parallel_run(const DeviceModelParams& params,
                                           const ParallelRunRequest& req,
                                           std::uint64_t rng_seed) {
  const double duration = workload_duration(req.workload, req.op);
  check_timeout(req.timeout_s, duration);
  const auto probs = outcome_probabilities(params, req.op);

  UnitStream rng(rng_seed);
  const double u_lock = rng.next();
  const double u_err = rng.next();

  ParallelRunResponse resp;
  resp.avg_power_w = power(params, req.op, req.workload.n_cores + 1);
  if (u_lock < probs.p_lockup) {
    resp.status = RunStatus::kTimeout;
    resp.error_free = false;
    resp.elapsed_s = req.timeout_s;
    return resp;
  }
  resp.elapsed_s = duration;
  resp.error_free = !(u_err < probs.p_error);
  return resp;
}

SimulatedBackend::SimulatedBackend(DeviceModelParams params,
                                   std::shared_ptr<GoldenCache> golden)
    : params_(std::move(params)), golden_(std::move(golden)) {
  params_.validate();
}

RunResponse SimulatedBackend::run(const RunRequest& req,
                                  std::uint64_t rng_seed) {
  return simulated_run(params_, req, rng_seed, *golden_);
}

ParallelRunResponse SimulatedBackend::run_parallel(const ParallelRunRequest& req,
                                                   std::uint64_t rng_seed) {
  return simulated_parallel_run(params_, req, rng_seed);
}

}  // namespace gbx
