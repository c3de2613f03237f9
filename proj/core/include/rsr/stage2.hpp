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

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "rsr/datagen.hpp"
#include "rsr/random.hpp"
#include "rsr/subspace.hpp"

namespace rsr {

struct Stage2Config {
  /// Gap constant in the rank test gamma_hat[r+1] <= C' ||Sigma_xi||.
  double C_prime = 4.0;
  /// Batch-size constant: B = ceil(batch_factor * max(r_hat, ln((3/delta) ln(1/delta)))).
  double batch_factor = 2.75;
  double delta = 0.05;
  /// Assumed corruption fraction used for sizing T.
  double epsilon = 0.0;
  Index T_cap = 1'000'000;
  std::optional<Index> B_override;
  /// Divide singular values by sqrt(B), so squares are batch-covariance eigenvalues.
  bool normalize_spectra = true;
  /// Materialize every batch spectrum in Stage2Result::spectrum (T * r_hat doubles).
  bool keep_spectrum = false;
  /// Worker threads for the batch loop; the result does not depend on it.
  unsigned threads = 1;

  void validate() const;
};

struct Stage2Sizing {
  Index B = 0;
  Index T = 0;
  bool capped = false;
};

/// Throws epsilon_too_large when 1 - 1.1 eps <= 0.
Stage2Sizing stage2_sizing(Index r_hat, double epsilon, double delta, double batch_factor, Index T_cap);

struct RankDecision {
  Index r_tilde = 0;
  bool gap_found = false;
};

/// Smallest r with gamma_hat[r] (0-based) <= max(C' ||Sigma_xi||, 1e-12 gamma_hat[0]).
/// Returns r_tilde = size and gap_found = false when nothing qualifies.
RankDecision detect_rank(std::span<const double> gamma_hat, double C_prime, const NoiseModel& noise);

struct Stage2Result {
  Index r_tilde = 0;
  Index k = 0;
  bool gap_found = false;
  bool capped = false;
  Index T_used = 0;
  Index B_used = 0;
  std::vector<double> gamma_hat;
  SpectrumTable spectrum;  // empty unless keep_spectrum
  SubspaceBasis fine_basis;
  SubspaceBasis lifted_basis;
};

/// Repeated batch spectra on the projected data X_hat = V^T X. Throws
/// insufficient_samples when n < B and degenerate_data when every direction
/// falls under the noise threshold (r_tilde = 0).
Stage2Result fine_estimate(const Eigen::Ref<const Matrix>& X_hat, const SubspaceBasis& V,
                           const NoiseModel& noise, const Stage2Config& config, Seed seed);

/// One row per batch, columns sigma_1..sigma_w.
void write_spectrum_csv(const SpectrumTable& table, const std::filesystem::path& path);

}  // namespace rsr
