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

#include <vector>

#include "rsr/datagen.hpp"
#include "rsr/random.hpp"
#include "rsr/subspace.hpp"

namespace rsr {

struct ClassicRansacConfig {
  Index r = 1;                      // target dimension, known in advance
  double dist_threshold = 0.0;      // a column counts toward consensus when its residual is <= this
  double consensus_fraction = 0.5;  // stop as soon as this fraction of n agrees
  Index max_iters = 100'000;
  double rank_tol = kDefaultRankTol;
  Seed seed = 0;

  void validate(Index d) const;
};

/// max(1e-9 * median column norm, sqrt(tr Sigma_xi) + 5 sqrt(||Sigma_xi||)).
double default_dist_threshold(const Eigen::Ref<const Matrix>& X, const NoiseModel& noise);

struct ClassicRansacResult {
  SubspaceBasis basis;
  Index consensus_count = 0;
  Index iterations = 0;  // iterations actually run, including the early-exit one
};

/// Sample columns until they span r dimensions (at most min(n, 4r) draws per
/// attempt), score the span by consensus, keep the best. Throws degenerate_data
/// when no attempt ever reaches rank r.
ClassicRansacResult classic_ransac(const Eigen::Ref<const Matrix>& X, const ClassicRansacConfig& config);

/// Top-r left singular vectors of the inlier columns. Ground-truth reference
/// only; the estimators never see the mask.
SubspaceBasis oracle_pca(const Eigen::Ref<const Matrix>& X, const std::vector<bool>& inlier_mask, Index r);

}  // namespace rsr
