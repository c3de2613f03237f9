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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsr {

enum class ErrorCode {
  shape_error,
  degenerate_input,
  empty_input,
  invalid_argument,
  infeasible_adversary,
  odd_sample_count,
  insufficient_samples,
  epsilon_too_large,
  degenerate_data,
  config_error,
  io_error,
  schema_error,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this exception type; callers that
// need to distinguish failure kinds switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the "Name: " prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace rsr
