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

#include "rsr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "rsr/error.hpp"

namespace rsr {
namespace {

// Grows an orthonormal basis one drawn column at a time (modified Gram-Schmidt
// with one re-orthogonalization pass). Returns the number of accepted columns.
Index span_by_drawing(const Eigen::Ref<const Matrix>& X, Index r, Index max_draws, double rank_tol,
                      IndexSampler& sampler, SplitMix64& rng, Matrix& q) {
  const auto picks = sampler.draw(max_draws, rng);
  Index rank = 0;
  double largest = 0.0;
  for (Index p = 0; p < max_draws && rank < r; ++p) {
    Vector v = X.col(picks[static_cast<std::size_t>(p)]);
    const double norm = v.norm();
    largest = std::max(largest, norm);
    if (norm == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index c = 0; c < rank; ++c) v -= q.col(c).dot(v) * q.col(c);
    }
    const double rest = v.norm();
    if (rest > rank_tol * largest) q.col(rank++) = v / rest;
  }
  return rank;
}

}  // namespace

void ClassicRansacConfig::validate(Index d) const {
  if (r < 1 || r >= d) {
    fail(ErrorCode::invalid_argument, "classic RANSAC needs 1 <= r < d, got r=" + std::to_string(r));
  }
  if (!(dist_threshold >= 0.0)) fail(ErrorCode::invalid_argument, "dist_threshold must be non-negative");
  if (!(consensus_fraction > 0.0 && consensus_fraction <= 1.0)) {
    fail(ErrorCode::invalid_argument, "consensus_fraction must lie in (0, 1]");
  }
  if (max_iters < 1) fail(ErrorCode::invalid_argument, "max_iters must be at least 1");
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) fail(ErrorCode::invalid_argument, "rank_tol must lie in (0, 1)");
}

double default_dist_threshold(const Eigen::Ref<const Matrix>& X, const NoiseModel& noise) {
  const Vector norms = X.colwise().norm().transpose();
  const double floor =
      1e-9 * median(std::span<const double>(norms.data(), static_cast<std::size_t>(norms.size())));
  return std::max(floor, std::sqrt(noise.trace) + 5.0 * std::sqrt(noise.spectral_norm));
}

ClassicRansacResult classic_ransac(const Eigen::Ref<const Matrix>& X, const ClassicRansacConfig& config) {
  const Index d = X.rows();
  const Index n = X.cols();
  config.validate(d);
  if (n <= config.r) fail(ErrorCode::insufficient_samples, "classic RANSAC needs n > r");

  const Index max_draws = std::min(n, 4 * config.r);
  const auto needed = static_cast<Index>(std::ceil(config.consensus_fraction * static_cast<double>(n)));
  IndexSampler sampler(n);
  Matrix q(d, config.r);
  std::optional<Matrix> best;
  Index best_count = -1;
  Index iter = 0;

  while (iter < config.max_iters) {
    SplitMix64 rng(derive_seed(config.seed, {static_cast<std::uint64_t>(iter)}));
    ++iter;
    if (span_by_drawing(X, config.r, max_draws, config.rank_tol, sampler, rng, q) < config.r) continue;

    const SubspaceBasis candidate(q);
    const Vector residuals = projection_residuals(X, candidate);
    const auto count = static_cast<Index>((residuals.array() <= config.dist_threshold).count());
    if (count > best_count) {
      best_count = count;
      best = q;
    }
    if (count >= needed) break;
  }
  if (!best) {
    fail(ErrorCode::degenerate_data, "no attempt reached rank " + std::to_string(config.r) + " within " +
                                         std::to_string(max_draws) + " draws");
  }
  return {SubspaceBasis(std::move(*best)), best_count, iter};
}

SubspaceBasis oracle_pca(const Eigen::Ref<const Matrix>& X, const std::vector<bool>& inlier_mask, Index r) {
  if (static_cast<Index>(inlier_mask.size()) != X.cols()) {
    fail(ErrorCode::shape_error, "inlier mask length does not match column count");
  }
  const auto inliers = static_cast<Index>(std::count(inlier_mask.begin(), inlier_mask.end(), true));
  if (inliers < r) {
    fail(ErrorCode::insufficient_samples,
         "oracle PCA needs at least r=" + std::to_string(r) + " inliers, have " + std::to_string(inliers));
  }
  Matrix clean(X.rows(), inliers);
  Index c = 0;
  for (Index i = 0; i < X.cols(); ++i) {
    if (inlier_mask[static_cast<std::size_t>(i)]) clean.col(c++) = X.col(i);
  }
  return leading_left_singular_vectors(clean, r);
}

}  // namespace rsr
