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

#ifndef GBX_ERROR_HPP_
#define GBX_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gbx {

enum class ErrorCode {
  kUnsupportedVoltage,
  kDegenerateVoltage,
  kInvalidCoreCount,
  kInvalidArgument,
  kCalibrationDiverged,
  kInvalidSeed,
  kIndexOutOfRange,
  kMalformedFrame,
  kMalformedTrace,
  kEmptyWindow,
  kNonMonotonicTimestamps,
  kEmptyPlan,
  kBackendFailure,
  kNoFailuresObserved,
  kInsufficientData,
  kNoCommonFrequency,
  kNoRecords,
  kInfeasibleTarget,
  kConfigError,
};

const char* to_string(ErrorCode code);

// All library failures surface as gbx::Error; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Wire-protocol decode failure; offset is the byte index of the first
// offending character within the frame.
class MalformedFrame : public Error {
 public:
  MalformedFrame(std::size_t offset, const std::string& what);

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace gbx

#endif  // GBX_ERROR_HPP_
