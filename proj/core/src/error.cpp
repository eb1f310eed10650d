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

#include "gbx/error.hpp"

namespace gbx {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedVoltage: return "UnsupportedVoltage";
    case ErrorCode::kDegenerateVoltage: return "DegenerateVoltage";
    case ErrorCode::kInvalidCoreCount: return "InvalidCoreCount";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kCalibrationDiverged: return "CalibrationDiverged";
    case ErrorCode::kInvalidSeed: return "InvalidSeed";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kMalformedFrame: return "MalformedFrame";
    case ErrorCode::kMalformedTrace: return "MalformedTrace";
    case ErrorCode::kEmptyWindow: return "EmptyWindow";
    case ErrorCode::kNonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::kEmptyPlan: return "EmptyPlan";
    case ErrorCode::kBackendFailure: return "BackendFailure";
    case ErrorCode::kNoFailuresObserved: return "NoFailuresObserved";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kNoCommonFrequency: return "NoCommonFrequency";
    case ErrorCode::kNoRecords: return "NoRecords";
    case ErrorCode::kInfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

MalformedFrame::MalformedFrame(std::size_t offset, const std::string& what)
    : Error(ErrorCode::kMalformedFrame,
            what + " at byte " + std::to_string(offset)),
      offset_(offset) {}

}  // namespace gbx
