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

#include "rsr/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "rsr/error.hpp"

namespace rsr {
namespace {

double largest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

SubspaceBasis::SubspaceBasis(Matrix columns, double tol) : columns_(std::move(columns)) {
  if (columns_.cols() < 1 || columns_.cols() > columns_.rows()) {
    fail(ErrorCode::invalid_argument,
         "basis needs 1 <= r <= d, got d=" + std::to_string(columns_.rows()) +
             " r=" + std::to_string(columns_.cols()));
  }
  const Matrix gram = columns_.transpose() * columns_;
  const double dev = (gram - Matrix::Identity(columns_.cols(), columns_.cols())).cwiseAbs().maxCoeff();
  if (!(dev <= tol)) {
    fail(ErrorCode::invalid_argument, "columns are not orthonormal (max deviation " +
                                          std::to_string(dev) + ")");
  }
}

SpectrumTable::SpectrumTable(Index width, bool normalized) : width_(width), normalized_(normalized) {
  if (width < 1) fail(ErrorCode::invalid_argument, "spectrum width must be positive");
}

std::span<const double> SpectrumTable::row(Index j) const {
  if (j < 0 || j >= rows()) fail(ErrorCode::invalid_argument, "spectrum row out of range");
  return {values_.data() + j * width_, static_cast<std::size_t>(width_)};
}

void SpectrumTable::append_row(std::span<const double> row) {
  if (static_cast<Index>(row.size()) != width_) {
    fail(ErrorCode::shape_error, "spectrum row has length " + std::to_string(row.size()) +
                                     ", table width is " + std::to_string(width_));
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!(row[i] >= 0.0) || (i > 0 && row[i] > row[i - 1])) {
      fail(ErrorCode::invalid_argument, "spectrum row must be non-increasing and non-negative");
    }
  }
  values_.insert(values_.end(), row.begin(), row.end());
}

SubspaceBasis orthonormal_basis(const Eigen::Ref<const Matrix>& columns, double rank_tol) {
  if (columns.cols() < 1 || columns.rows() < 1) fail(ErrorCode::empty_input, "no columns");
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) fail(ErrorCode::invalid_argument, "rank_tol must lie in (0, 1)");
  if (!columns.allFinite()) fail(ErrorCode::invalid_argument, "non-finite entries");

  const Index d = columns.rows();
  const Index m = columns.cols();

  // Tall inputs are reduced to an m x m triangle first: SVD(R) costs O(m^3)
  // instead of an SVD of the whole d x m block.
  Matrix left;
  Vector sigma;
  if (d > m) {
    Eigen::HouseholderQR<Matrix> qr(columns);
    const Matrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU);
    sigma = svd.singularValues();
    left = qr.householderQ() * (Matrix(d, m) << svd.matrixU(), Matrix::Zero(d - m, m)).finished();
  } else {
    Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
    sigma = svd.singularValues();
    left = svd.matrixU();
  }

  if (sigma.size() == 0 || sigma(0) == 0.0) fail(ErrorCode::degenerate_input, "all-zero input matrix");
  const double cutoff = rank_tol * sigma(0);
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  return SubspaceBasis(left.leftCols(rank));
}

double projection_residual(const Eigen::Ref<const Vector>& x, const SubspaceBasis& basis) {
  if (x.size() != basis.d()) {
    fail(ErrorCode::shape_error, "vector has dimension " + std::to_string(x.size()) +
                                     ", basis ambient dimension is " + std::to_string(basis.d()));
  }
  const Vector coeffs = basis.columns().transpose() * x;
  return (x - basis.columns() * coeffs).norm();
}

Vector projection_residuals(const Eigen::Ref<const Matrix>& X, const SubspaceBasis& basis) {
  if (X.rows() != basis.d()) {
    fail(ErrorCode::shape_error, "matrix has " + std::to_string(X.rows()) +
                                     " rows, basis ambient dimension is " + std::to_string(basis.d()));
  }
  const Matrix coeffs = basis.columns().transpose() * X;
  Matrix residual = X;
  residual.noalias() -= basis.columns() * coeffs;
  return residual.colwise().norm().transpose();
}

double subspace_distance(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.d() != b.d()) {
    fail(ErrorCode::shape_error, "ambient dimensions differ: " + std::to_string(a.d()) + " vs " +
                                     std::to_string(b.d()));
  }
  const Matrix& qa = a.columns();
  const Matrix& qb = b.columns();
  const Matrix a_off_b = qa - qb * (qb.transpose() * qa);
  const Matrix b_off_a = qb - qa * (qa.transpose() * qb);
  const double dist = std::max(largest_singular_value(a_off_b), largest_singular_value(b_off_a));
  return std::clamp(dist, 0.0, 1.0);
}

double median(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::empty_input, "median of an empty list");
  std::vector<double> work(values.begin(), values.end());
  const std::size_t mid = work.size() / 2;
  std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(mid), work.end());
  const double upper = work[mid];
  if (work.size() % 2 == 1) return upper;
  const double lower = *std::max_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Matrix project(const Eigen::Ref<const Matrix>& X, const SubspaceBasis& basis) {
  if (X.rows() != basis.d()) {
    fail(ErrorCode::shape_error, "matrix has " + std::to_string(X.rows()) +
                                     " rows, basis ambient dimension is " + std::to_string(basis.d()));
  }
  return basis.columns().transpose() * X;
}

std::vector<double> batch_singular_values(const Eigen::Ref<const Matrix>& batch, bool normalize) {
  if (batch.cols() < 1) fail(ErrorCode::empty_input, "batch has no columns");
  const Index rows = batch.rows();
  std::vector<double> out(static_cast<std::size_t>(rows), 0.0);
  Eigen::JacobiSVD<Matrix> svd(batch);
  const Vector& sigma = svd.singularValues();
  const double scale = normalize ? 1.0 / std::sqrt(static_cast<double>(batch.cols())) : 1.0;
  for (Index i = 0; i < sigma.size(); ++i) out[static_cast<std::size_t>(i)] = sigma(i) * scale;
  return out;
}

SubspaceBasis leading_left_singular_vectors(const Eigen::Ref<const Matrix>& X, Index k) {
  if (k < 1 || k > X.rows()) {
    fail(ErrorCode::invalid_argument, "requested " + std::to_string(k) + " singular vectors of a " +
                                          std::to_string(X.rows()) + "-row matrix");
  }
  if (X.cols() >= k) {
    Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU);
    return SubspaceBasis(svd.matrixU().leftCols(k));
  }
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeFullU);
  return SubspaceBasis(svd.matrixU().leftCols(k));
}

SubspaceBasis compose(const SubspaceBasis& outer, const SubspaceBasis& inner) {
  if (outer.r() != inner.d()) {
    fail(ErrorCode::shape_error, "inner basis lives in R^" + std::to_string(inner.d()) +
                                     " but outer basis has " + std::to_string(outer.r()) + " columns");
  }
  return SubspaceBasis(outer.columns() * inner.columns());
}

}  // namespace rsr
