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

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "rsr/datagen.hpp"
#include "rsr/random.hpp"
#include "rsr/subspace.hpp"

namespace rsr {

struct Stage1Config {
  double C = 2.2;
  double t0 = kDefaultSmallBallT0;
  /// The absolute residual floor is eta_floor_scale times the median column norm.
  double eta_floor_scale = 1e-9;
  double rank_tol = kDefaultRankTol;
  /// When set, the threshold uses this rank instead of the current batch size.
  std::optional<Index> r_star_hint;
  Index initial_B = 2;

  /// Throws invalid_argument unless C >= 2.2, 0 < t0 <= 1 and the rest are sane.
  void validate() const;
};

enum class Stage1Termination { threshold, exhausted };

std::string_view termination_name(Stage1Termination t);

struct MedResEntry {
  Index batch_size = 0;
  double medres = 0.0;
};

struct Stage1Result {
  SubspaceBasis basis;
  Index r_hat = 0;
  double eta_thresh = 0.0;  // threshold at the last check, before the floor
  double eta_floor = 0.0;
  std::vector<MedResEntry> medres_trace;
  Stage1Termination terminated_by = Stage1Termination::exhausted;
};

/// C * (5 sqrt(r_eff ||Sigma_xi||) + sqrt(tr Sigma_xi)) / t0.
double eta_thresh(double C, double t0, Index r_eff, const NoiseModel& noise);

/// Median residual of the columns of X that are not in the batch.
double med_res(const SubspaceBasis& V, const Eigen::Ref<const Matrix>& X,
               std::span<const Index> batch_indices);

/// Batch-doubling coarse estimate. Only the raw sample matrix is read.
Stage1Result coarse_estimate(const Eigen::Ref<const Matrix>& X, const NoiseModel& noise,
                             const Stage1Config& config, Seed seed);

}  // namespace rsr
