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

#include "rsr/pipeline.hpp"

#include <optional>

#include <nlohmann/json.hpp>

#include "rsr/error.hpp"

namespace rsr {
namespace {

using Clock = std::chrono::steady_clock;

nlohmann::json basis_json(const SubspaceBasis& basis) {
  nlohmann::json cols = nlohmann::json::array();
  for (Index c = 0; c < basis.r(); ++c) {
    const Vector col = basis.columns().col(c);
    cols.push_back(std::vector<double>(col.data(), col.data() + col.size()));
  }
  return cols;
}

}  // namespace

std::string_view centering_name(Centering c) {
  return c == Centering::pairwise_difference ? "pairwise_difference" : "none";
}

void RansacPlusConfig::validate() const {
  stage1.validate();
  stage2.validate();
}

StageTwoError::StageTwoError(const Error& cause, Stage1Result coarse)
    : Error(cause.code(), "stage 2: " + cause.detail()), stage1_(std::move(coarse)) {}

std::int64_t whole_ms(std::chrono::nanoseconds t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t).count();
}

RecoveryResult ransac_plus(const Eigen::Ref<const Matrix>& X, const NoiseModel& noise, double epsilon,
                           const RansacPlusConfig& config, Seed seed) {
  const auto start = Clock::now();
  config.validate();

  Matrix centered;
  NoiseModel effective_noise = noise;
  double effective_eps = epsilon;
  if (config.center == Centering::pairwise_difference) {
    centered = pairwise_difference(Matrix(X));
    effective_noise = noise.scaled(2.0);
    effective_eps = 2.0 * epsilon;
  }
  const Eigen::Ref<const Matrix> data = config.center == Centering::pairwise_difference
                                            ? Eigen::Ref<const Matrix>(centered)
                                            : X;
  if (data.cols() < 4) fail(ErrorCode::insufficient_samples, "RANSAC+ needs at least 4 samples");

  Stage2Config stage2 = config.stage2;
  stage2.epsilon = effective_eps;
  stage2.validate();

  const auto t0 = Clock::now();
  Stage1Result coarse = coarse_estimate(data, effective_noise, config.stage1, derive_seed(seed, {1}));
  const auto t1 = Clock::now();
  const Matrix projected = project(data, coarse.basis);
  const auto t2 = Clock::now();
  std::optional<Stage2Result> fine;
  try {
    fine.emplace(fine_estimate(projected, coarse.basis, effective_noise, stage2, derive_seed(seed, {2})));
  } catch (const Error& e) {
    throw StageTwoError(e, std::move(coarse));
  }
  const auto t3 = Clock::now();

  WallTimes times{t1 - t0, t2 - t1, t3 - t2, t3 - start};
  const Index r_hat = coarse.r_hat;
  const Index r_tilde = fine->r_tilde;
  SubspaceBasis basis = fine->lifted_basis;
  return RecoveryResult{std::move(basis), r_hat, r_tilde, std::move(coarse), std::move(*fine), times};
}

std::string to_json(const RecoveryResult& result) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& e : result.stage1.medres_trace) trace.push_back({{"B", e.batch_size}, {"medres", e.medres}});
  const nlohmann::json out{
      {"r_hat", result.r_hat},
      {"r_tilde", result.r_tilde},
      {"stage1",
       {{"terminated_by", std::string(termination_name(result.stage1.terminated_by))},
        {"eta_thresh", result.stage1.eta_thresh},
        {"eta_floor", result.stage1.eta_floor},
        {"medres_trace", trace}}},
      {"stage2",
       {{"k", result.stage2.k},
        {"gap_found", result.stage2.gap_found},
        {"capped", result.stage2.capped},
        {"T_used", result.stage2.T_used},
        {"B_used", result.stage2.B_used},
        {"gamma_hat", result.stage2.gamma_hat}}},
      {"wall_times_ms",
       {{"stage1", whole_ms(result.wall_times.stage1)},
        {"projection", whole_ms(result.wall_times.projection)},
        {"stage2", whole_ms(result.wall_times.stage2)},
        {"total", whole_ms(result.wall_times.total)}}},
      {"basis", basis_json(result.basis)},
  };
  return out.dump(2);
}

}  // namespace rsr
