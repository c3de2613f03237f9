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

#include <span>
#include <vector>

#include <Eigen/Core>

namespace rsr {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kOrthonormalityTol = 1e-10;
inline constexpr double kDefaultRankTol = 1e-8;

/// A d x r matrix with orthonormal columns, 1 <= r <= d.
///
/// Every basis that crosses a module boundary (coarse basis V, fine basis,
/// ground-truth U*) is carried in this type, so the orthonormality check happens
/// once at construction.
class SubspaceBasis {
 public:
  /// Throws Error(invalid_argument) unless max|Q^T Q - I| <= tol and 1 <= r <= d.
  explicit SubspaceBasis(Matrix columns, double tol = kOrthonormalityTol);

  Index d() const noexcept { return columns_.rows(); }
  Index r() const noexcept { return columns_.cols(); }
  const Matrix& columns() const noexcept { return columns_; }

 private:
  Matrix columns_;
};

/// Per-batch singular values, one row of fixed width per batch.
class SpectrumTable {
 public:
  SpectrumTable() = default;
  SpectrumTable(Index width, bool normalized);

  Index width() const noexcept { return width_; }
  Index rows() const noexcept { return width_ == 0 ? 0 : static_cast<Index>(values_.size()) / width_; }
  bool normalized() const noexcept { return normalized_; }

  std::span<const double> row(Index j) const;

  /// Rows must be non-increasing, non-negative and exactly width() long.
  void append_row(std::span<const double> row);

  void reserve(Index rows) { values_.reserve(static_cast<std::size_t>(rows * width_)); }

 private:
  Index width_ = 0;
  bool normalized_ = true;
  std::vector<double> values_;
};

/// Orthonormal basis of the column space. The dimension is the numerical rank:
/// singular values above rank_tol * sigma_max are kept.
SubspaceBasis orthonormal_basis(const Eigen::Ref<const Matrix>& columns,
                                double rank_tol = kDefaultRankTol);

/// ||x - V V^T x||, computed without the ||x||^2 - ||V^T x||^2 cancellation.
double projection_residual(const Eigen::Ref<const Vector>& x, const SubspaceBasis& basis);

/// Column-wise projection_residual for every column of X.
Vector projection_residuals(const Eigen::Ref<const Matrix>& X, const SubspaceBasis& basis);

/// Spectral norm ||A A^T - B B^T||, in [0, 1]. Uses the projector identity
/// ||P - Q|| = max(||(I - Q) A||, ||(I - P) B||) so no d x d matrix is formed.
double subspace_distance(const SubspaceBasis& a, const SubspaceBasis& b);

/// Middle order statistic; mean of the two middle ones for even counts.
double median(std::span<const double> values);

/// V^T X.
Matrix project(const Eigen::Ref<const Matrix>& X, const SubspaceBasis& basis);

/// Singular values of a rows x cols batch (cols >= rows), non-increasing and
/// padded with zeros to exactly `rows` entries. With normalize set every value
/// is divided by sqrt(cols), so the squares are the eigenvalues of the batch
/// covariance (1/cols) X X^T.
std::vector<double> batch_singular_values(const Eigen::Ref<const Matrix>& batch, bool normalize);

/// Top-k left singular vectors of X as a basis.
SubspaceBasis leading_left_singular_vectors(const Eigen::Ref<const Matrix>& X, Index k);

/// Composes an outer basis (d x r) with an inner basis (r x k) into a d x k basis.
SubspaceBasis compose(const SubspaceBasis& outer, const SubspaceBasis& inner);

}  // namespace rsr
