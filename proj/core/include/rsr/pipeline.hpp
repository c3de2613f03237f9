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

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include "rsr/datagen.hpp"
#include "rsr/stage1.hpp"
#include "rsr/stage2.hpp"

namespace rsr {

enum class Centering { none, pairwise_difference };

std::string_view centering_name(Centering c);

struct RansacPlusConfig {
  Stage1Config stage1;
  Stage2Config stage2;  // stage2.epsilon is overwritten by the epsilon argument
  Centering center = Centering::none;

  void validate() const;
};

struct WallTimes {
  std::chrono::nanoseconds stage1{0};
  std::chrono::nanoseconds projection{0};
  std::chrono::nanoseconds stage2{0};
  std::chrono::nanoseconds total{0};
};

/// Whole milliseconds, truncated; sub-millisecond durations report 0.
std::int64_t whole_ms(std::chrono::nanoseconds t);

struct RecoveryResult {
  SubspaceBasis basis;
  Index r_hat = 0;
  Index r_tilde = 0;
  Stage1Result stage1;
  Stage2Result stage2;
  WallTimes wall_times;
};

/// Raised when stage 2 fails after stage 1 succeeded. Keeps the error code of
/// the underlying failure and the completed coarse estimate.
class StageTwoError : public Error {
 public:
  StageTwoError(const Error& cause, Stage1Result coarse);

  const Stage1Result& stage1() const noexcept { return stage1_; }

 private:
  Stage1Result stage1_;
};

/// Coarse estimate, projection onto it, then the fine estimate. With
/// pairwise-difference centering the noise moments and epsilon are doubled
/// before either stage sees them.
RecoveryResult ransac_plus(const Eigen::Ref<const Matrix>& X, const NoiseModel& noise, double epsilon,
                           const RansacPlusConfig& config, Seed seed);

/// Compact JSON rendering (bases, gamma_hat, MedRes trace, timings).
std::string to_json(const RecoveryResult& result);

}  // namespace rsr
