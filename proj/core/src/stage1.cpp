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

#include "rsr/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rsr/error.hpp"

namespace rsr {
namespace {

Matrix gather_columns(const Eigen::Ref<const Matrix>& X, std::span<const Index> indices) {
  Matrix out(X.rows(), static_cast<Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) out.col(static_cast<Index>(c)) = X.col(indices[c]);
  return out;
}

double median_column_norm(const Eigen::Ref<const Matrix>& X) {
  const Vector norms = X.colwise().norm().transpose();
  return median(std::span<const double>(norms.data(), static_cast<std::size_t>(norms.size())));
}

}  // namespace

void Stage1Config::validate() const {
  if (!(C >= 2.2)) fail(ErrorCode::invalid_argument, "stage1 C must be >= 2.2");
  if (!(t0 > 0.0 && t0 <= 1.0)) fail(ErrorCode::invalid_argument, "stage1 t0 must lie in (0, 1]");
  if (!(eta_floor_scale >= 0.0)) fail(ErrorCode::invalid_argument, "eta_floor_scale must be non-negative");
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) fail(ErrorCode::invalid_argument, "rank_tol must lie in (0, 1)");
  if (r_star_hint && *r_star_hint < 1) fail(ErrorCode::invalid_argument, "r_star_hint must be positive");
  if (initial_B < 1) fail(ErrorCode::invalid_argument, "initial_B must be positive");
}

std::string_view termination_name(Stage1Termination t) {
  return t == Stage1Termination::threshold ? "threshold" : "exhausted";
}

double eta_thresh(double C, double t0, Index r_eff, const NoiseModel& noise) {
  return C * (5.0 * std::sqrt(static_cast<double>(r_eff) * noise.spectral_norm) + std::sqrt(noise.trace)) / t0;
}

double med_res(const SubspaceBasis& V, const Eigen::Ref<const Matrix>& X,
               std::span<const Index> batch_indices) {
  const Index n = X.cols();
  std::vector<char> in_batch(static_cast<std::size_t>(n), 0);
  for (Index i : batch_indices) {
    if (i < 0 || i >= n) fail(ErrorCode::invalid_argument, "batch index out of range");
    in_batch[static_cast<std::size_t>(i)] = 1;
  }
  const Vector residuals = projection_residuals(X, V);
  std::vector<double> held_out;
  held_out.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    if (!in_batch[static_cast<std::size_t>(i)]) held_out.push_back(residuals(i));
  }
  if (held_out.empty()) fail(ErrorCode::empty_input, "batch covers every sample; nothing left to score");
  return median(held_out);
}

Stage1Result coarse_estimate(const Eigen::Ref<const Matrix>& X, const NoiseModel& noise,
                             const Stage1Config& config, Seed seed) {
  config.validate();
  const Index d = X.rows();
  const Index n = X.cols();
  if (n < 4) fail(ErrorCode::insufficient_samples, "stage 1 needs n >= 4, got " + std::to_string(n));
  if (d < 2) fail(ErrorCode::shape_error, "stage 1 needs d >= 2");

  const double floor = config.eta_floor_scale * median_column_norm(X);
  const Index limit = std::min(d, n - 1);

  std::mt19937_64 rng(seed);
  IndexSampler sampler(n);
  std::vector<MedResEntry> trace;
  std::optional<Stage1Result> last;

  auto evaluate = [&](Index B) -> bool {
    const auto batch = sampler.draw(B, rng);
    const Matrix columns = gather_columns(X, batch);
    SubspaceBasis V = orthonormal_basis(columns, config.rank_tol);
    const double medres = med_res(V, X, batch);
    const double eta = eta_thresh(config.C, config.t0, config.r_star_hint.value_or(B), noise);
    trace.push_back({B, medres});
    const Index rank = V.r();
    const bool done = medres <= std::max(eta, floor);
    last.emplace(Stage1Result{std::move(V), rank, eta, floor, {},
                              done ? Stage1Termination::threshold : Stage1Termination::exhausted});
    return done;
  };

  bool done = false;
  if (config.initial_B >= limit) {
    done = evaluate(std::min(config.initial_B, n - 1));
  } else {
    for (Index B = config.initial_B; B < limit && !done; B *= 2) done = evaluate(B);
  }
  last->medres_trace = std::move(trace);
  return std::move(*last);
}

}  // namespace rsr
