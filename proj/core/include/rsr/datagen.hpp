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
#include <string>
#include <string_view>
#include <vector>

#include "rsr/random.hpp"
#include "rsr/subspace.hpp"

namespace rsr {

enum class DistributionKind { gaussian };

/// Planted low-rank covariance U* D* U*^T.
struct CleanModel {
  SubspaceBasis u_star;
  std::vector<double> eigenvalues;  // diagonal of D*, positive, non-increasing
  DistributionKind distribution = DistributionKind::gaussian;

  Index d() const noexcept { return u_star.d(); }
  Index r_star() const noexcept { return u_star.r(); }
  double gamma_min() const { return eigenvalues.back(); }
  double gamma_max() const { return eigenvalues.front(); }

  /// Throws invalid_argument when the eigenvalue list does not match U*.
  void validate() const;
};

/// Clean model with a Haar-random U* and the given spectrum.
CleanModel random_clean_model(Index d, std::vector<double> eigenvalues, Seed seed);

enum class NoiseKind { zero, isotropic, diagonal };

/// Noise covariance Sigma_xi. Only trace and spectral norm reach the estimators.
struct NoiseModel {
  NoiseKind kind = NoiseKind::zero;
  double sigma2 = 0.0;
  double trace = 0.0;
  double spectral_norm = 0.0;
  std::vector<double> diagonal;  // per-coordinate variances for the diagonal kind

  static NoiseModel zero();
  /// Sigma_xi = (sigma2 / d) I_d: trace sigma2, spectral norm sigma2 / d.
  static NoiseModel isotropic(double sigma2, Index d);
  static NoiseModel diagonal_variances(std::vector<double> variances);
  /// Only trace and spectral norm are known (e.g. read back from a sidecar).
  static NoiseModel from_moments(double trace, double spectral_norm);

  /// Sigma_xi scaled by `factor` (pairwise differences use factor 2).
  NoiseModel scaled(double factor) const;

  void validate() const;
};

enum class AdversaryKind { none, orthogonal_lowrank, inlier_mimic, point_mass };

/// How the replaced columns are filled in. Replacement positions are always a
/// uniformly random subset of size floor(eps * n).
struct AdversaryStrategy {
  AdversaryKind kind = AdversaryKind::none;
  Index rank = 2;             // orthogonal_lowrank: rank of the outlier covariance
  double scale = 10.0;        // orthogonal_lowrank: its nonzero eigenvalues; inlier_mimic: covariance inflation
  std::vector<double> direction;  // point_mass: direction (random unit vector if empty)
  double magnitude = 10.0;        // point_mass

  static AdversaryStrategy none();
  static AdversaryStrategy orthogonal_lowrank(Index rank, double scale);
  static AdversaryStrategy inlier_mimic(double scale);
  static AdversaryStrategy point_mass(std::vector<double> direction, double magnitude);
};

std::string_view adversary_name(AdversaryKind kind);
AdversaryKind parse_adversary_kind(std::string_view name);

/// An (eps, Sigma_xi)-corrupted sample matrix. The inlier mask is ground truth
/// for metrics only; estimators take the raw matrix.
struct CorruptedDataset {
  Matrix X;
  double epsilon = 0.0;
  std::vector<bool> inlier_mask;
  CleanModel clean_model;
  NoiseModel noise_model;
  Seed seed = 0;

  Index n() const noexcept { return X.cols(); }
  Index d() const noexcept { return X.rows(); }
  Index outlier_count() const;
};

/// floor(eps * n): the number of columns the adversary replaces.
Index outlier_budget(Index n, double epsilon);

struct CleanSample {
  Matrix X;  // d x n, columns U* D*^{1/2} w_i
  Matrix W;  // r* x n standard normal draws
};

CleanSample generate_clean(const CleanModel& model, Index n, Seed seed);

/// Adds independent N(0, Sigma_xi) to each column. The zero kind returns the
/// input unchanged.
Matrix apply_noise(const Matrix& X_clean, const NoiseModel& noise, Seed seed);

/// Replaces exactly floor(eps * n) uniformly chosen columns according to the
/// strategy and records them in the inlier mask.
CorruptedDataset apply_adversary(Matrix X, double epsilon, const AdversaryStrategy& strategy,
                                 const CleanModel& clean_model, const NoiseModel& noise, Seed seed);

/// Convenience: generate_clean -> apply_noise -> apply_adversary with streams
/// derived from `seed`.
CorruptedDataset generate_dataset(const CleanModel& model, Index n, double epsilon,
                                  const NoiseModel& noise, const AdversaryStrategy& strategy,
                                  Seed seed);

/// Column pairs (x_{2i}, x_{2i+1}) -> x_{2i} - x_{2i+1}. A difference is an
/// inlier iff both parents are. Noise moments and clean spectrum double; the
/// epsilon field becomes 2 eps.
CorruptedDataset pairwise_difference(const CorruptedDataset& dataset);

/// Same transform on a bare matrix (what the pipeline sees).
Matrix pairwise_difference(const Matrix& X);

struct SmallBallReport {
  double min_fraction = 0.0;
  double min_eigenvalue = 0.0;
};

/// Minimum over `trials` random unit directions v of the fraction of columns
/// with |v^T w_i| >= t0 / 2, and the smallest eigenvalue of (1/n) W W^T.
SmallBallReport small_ball_diagnostic(const Matrix& W, double t0, Index trials, Seed seed);

inline constexpr double kDefaultSmallBallT0 = 0.25;

}  // namespace rsr
