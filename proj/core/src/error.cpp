// Copyright 2026 The RSR Authors
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

#include "rsr/error.hpp"

namespace rsr {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::shape_error: return "ShapeError";
    case ErrorCode::degenerate_input: return "DegenerateInput";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::infeasible_adversary: return "InfeasibleAdversary";
    case ErrorCode::odd_sample_count: return "OddSampleCount";
    case ErrorCode::insufficient_samples: return "InsufficientSamples";
    case ErrorCode::epsilon_too_large: return "EpsilonTooLarge";
    case ErrorCode::degenerate_data: return "DegenerateData";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::schema_error: return "SchemaError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code),
      detail_(message) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rsr
