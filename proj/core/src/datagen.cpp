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

#include "rsr/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "rsr/error.hpp"

namespace rsr {
namespace {

Matrix standard_normal(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

Matrix thin_q(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

// Orthonormal basis of a random `rank`-dimensional subspace of span(U*)^perp.
Matrix orthogonal_complement_directions(const SubspaceBasis& u_star, Index rank, std::mt19937_64& rng) {
  const Matrix& u = u_star.columns();
  Matrix g = standard_normal(u_star.d(), rank, rng);
  for (int pass = 0; pass < 2; ++pass) g -= u * (u.transpose() * g);
  Matrix q = thin_q(g);
  q -= u * (u.transpose() * q);
  return thin_q(q);
}

}  // namespace

Index outlier_budget(Index n, double epsilon) {
  // The 1e-9 slack keeps decimal inputs such as 0.29 * 100 at 29.
  return static_cast<Index>(std::floor(epsilon * static_cast<double>(n) + 1e-9));
}

void CleanModel::validate() const {
  if (static_cast<Index>(eigenvalues.size()) != u_star.r()) {
    fail(ErrorCode::invalid_argument, "clean model has " + std::to_string(eigenvalues.size()) +
                                          " eigenvalues for rank " + std::to_string(u_star.r()));
  }
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues[i] > 0.0) || !std::isfinite(eigenvalues[i])) {
      fail(ErrorCode::invalid_argument, "clean eigenvalues must be positive and finite");
    }
    if (i > 0 && eigenvalues[i] > eigenvalues[i - 1]) {
      fail(ErrorCode::invalid_argument, "clean eigenvalues must be non-increasing");
    }
  }
}

CleanModel random_clean_model(Index d, std::vector<double> eigenvalues, Seed seed) {
  const auto r = static_cast<Index>(eigenvalues.size());
  if (r < 1 || r > d) fail(ErrorCode::invalid_argument, "need 1 <= r* <= d");
  std::mt19937_64 rng(seed);
  CleanModel model{SubspaceBasis(thin_q(standard_normal(d, r, rng))), std::move(eigenvalues),
                   DistributionKind::gaussian};
  model.validate();
  return model;
}

NoiseModel NoiseModel::zero() { return {}; }

NoiseModel NoiseModel::isotropic(double sigma2, Index d) {
  if (!(sigma2 >= 0.0) || d < 1) fail(ErrorCode::invalid_argument, "isotropic noise needs sigma2 >= 0, d >= 1");
  if (sigma2 == 0.0) return zero();
  NoiseModel m;
  m.kind = NoiseKind::isotropic;
  m.sigma2 = sigma2;
  m.trace = sigma2;
  m.spectral_norm = sigma2 / static_cast<double>(d);
  return m;
}

NoiseModel NoiseModel::diagonal_variances(std::vector<double> variances) {
  NoiseModel m;
  m.kind = NoiseKind::diagonal;
  for (double v : variances) {
    if (!(v >= 0.0)) fail(ErrorCode::invalid_argument, "noise variances must be non-negative");
    m.trace += v;
    m.spectral_norm = std::max(m.spectral_norm, v);
  }
  m.sigma2 = m.trace;
  m.diagonal = std::move(variances);
  if (m.trace == 0.0) return zero();
  return m;
}

NoiseModel NoiseModel::from_moments(double trace, double spectral_norm) {
  NoiseModel m;
  m.kind = trace == 0.0 ? NoiseKind::zero : NoiseKind::diagonal;
  m.sigma2 = trace;
  m.trace = trace;
  m.spectral_norm = spectral_norm;
  m.validate();
  return m;
}

NoiseModel NoiseModel::scaled(double factor) const {
  NoiseModel m = *this;
  m.sigma2 *= factor;
  m.trace *= factor;
  m.spectral_norm *= factor;
  for (double& v : m.diagonal) v *= factor;
  return m;
}

void NoiseModel::validate() const {
  if (!(spectral_norm >= 0.0) || !(trace >= spectral_norm)) {
    fail(ErrorCode::invalid_argument, "noise model needs trace >= spectral_norm >= 0");
  }
  if (kind == NoiseKind::zero && (trace != 0.0 || spectral_norm != 0.0)) {
    fail(ErrorCode::invalid_argument, "zero noise with nonzero moments");
  }
}

AdversaryStrategy AdversaryStrategy::none() { return {}; }

AdversaryStrategy AdversaryStrategy::orthogonal_lowrank(Index rank, double scale) {
  AdversaryStrategy s;
  s.kind = AdversaryKind::orthogonal_lowrank;
  s.rank = rank;
  s.scale = scale;
  return s;
}

AdversaryStrategy AdversaryStrategy::inlier_mimic(double scale) {
  AdversaryStrategy s;
  s.kind = AdversaryKind::inlier_mimic;
  s.scale = scale;
  return s;
}

AdversaryStrategy AdversaryStrategy::point_mass(std::vector<double> direction, double magnitude) {
  AdversaryStrategy s;
  s.kind = AdversaryKind::point_mass;
  s.direction = std::move(direction);
  s.magnitude = magnitude;
  return s;
}

std::string_view adversary_name(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::none: return "none";
    case AdversaryKind::orthogonal_lowrank: return "orthogonal_lowrank";
    case AdversaryKind::inlier_mimic: return "inlier_mimic";
    case AdversaryKind::point_mass: return "point_mass";
  }
  return "none";
}

AdversaryKind parse_adversary_kind(std::string_view name) {
  for (auto kind : {AdversaryKind::none, AdversaryKind::orthogonal_lowrank, AdversaryKind::inlier_mimic,
                    AdversaryKind::point_mass}) {
    if (adversary_name(kind) == name) return kind;
  }
  fail(ErrorCode::config_error, "unknown adversary '" + std::string(name) + "'");
}

Index CorruptedDataset::outlier_count() const {
  return static_cast<Index>(std::count(inlier_mask.begin(), inlier_mask.end(), false));
}

CleanSample generate_clean(const CleanModel& model, Index n, Seed seed) {
  if (n < 1) fail(ErrorCode::invalid_argument, "need n >= 1");
  model.validate();
  std::mt19937_64 rng(seed);
  CleanSample sample;
  sample.W = standard_normal(model.r_star(), n, rng);
  Vector root(model.r_star());
  for (Index i = 0; i < model.r_star(); ++i) root(i) = std::sqrt(model.eigenvalues[static_cast<std::size_t>(i)]);
  sample.X = model.u_star.columns() * (root.asDiagonal() * sample.W);
  return sample;
}

Matrix apply_noise(const Matrix& X_clean, const NoiseModel& noise, Seed seed) {
  noise.validate();
  if (noise.kind == NoiseKind::zero) return X_clean;
  const Index d = X_clean.rows();
  Vector stddev(d);
  if (noise.kind == NoiseKind::isotropic) {
    stddev.setConstant(std::sqrt(noise.sigma2 / static_cast<double>(d)));
  } else {
    if (static_cast<Index>(noise.diagonal.size()) != d) {
      fail(ErrorCode::shape_error, "diagonal noise has " + std::to_string(noise.diagonal.size()) +
                                       " variances for dimension " + std::to_string(d));
    }
    for (Index i = 0; i < d; ++i) stddev(i) = std::sqrt(noise.diagonal[static_cast<std::size_t>(i)]);
  }
  std::mt19937_64 rng(seed);
  Matrix out = X_clean + stddev.asDiagonal() * standard_normal(d, X_clean.cols(), rng);
  return out;
}

CorruptedDataset apply_adversary(Matrix X, double epsilon, const AdversaryStrategy& strategy,
                                 const CleanModel& clean_model, const NoiseModel& noise, Seed seed) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) fail(ErrorCode::invalid_argument, "epsilon must lie in [0, 1)");
  if (X.rows() != clean_model.d()) fail(ErrorCode::shape_error, "data and clean model dimensions differ");
  const Index n = X.cols();
  const Index d = X.rows();

  if (strategy.kind == AdversaryKind::orthogonal_lowrank &&
      (strategy.rank < 1 || strategy.rank > d - clean_model.r_star())) {
    fail(ErrorCode::infeasible_adversary, "orthogonal outlier rank " + std::to_string(strategy.rank) +
                                              " does not fit in d - r* = " +
                                              std::to_string(d - clean_model.r_star()));
  }

  std::mt19937_64 position_rng(derive_seed(seed, {0}));
  const auto replaced = sample_without_replacement(n, outlier_budget(n, epsilon), position_rng);

  std::mt19937_64 rng(derive_seed(seed, {1}));
  switch (strategy.kind) {
    case AdversaryKind::none:
      break;
    case AdversaryKind::orthogonal_lowrank: {
      const Matrix q = orthogonal_complement_directions(clean_model.u_star, strategy.rank, rng);
      const double root = std::sqrt(strategy.scale);
      for (Index col : replaced) X.col(col) = q * (root * standard_normal(strategy.rank, 1, rng));
      break;
    }
    case AdversaryKind::inlier_mimic: {
      Vector root(clean_model.r_star());
      for (Index i = 0; i < root.size(); ++i) {
        root(i) = std::sqrt(strategy.scale * clean_model.eigenvalues[static_cast<std::size_t>(i)]);
      }
      for (Index col : replaced) {
        X.col(col) = clean_model.u_star.columns() * (root.asDiagonal() * standard_normal(root.size(), 1, rng));
      }
      break;
    }
    case AdversaryKind::point_mass: {
      Vector dir;
      if (strategy.direction.empty()) {
        dir = standard_normal(d, 1, rng);
      } else {
        if (static_cast<Index>(strategy.direction.size()) != d) {
          fail(ErrorCode::shape_error, "point_mass direction has wrong dimension");
        }
        dir = Eigen::Map<const Vector>(strategy.direction.data(), d);
      }
      if (dir.norm() == 0.0) fail(ErrorCode::invalid_argument, "point_mass direction is zero");
      const Vector point = strategy.magnitude * dir.normalized();
      for (Index col : replaced) X.col(col) = point;
      break;
    }
  }

  CorruptedDataset out{std::move(X), epsilon, std::vector<bool>(static_cast<std::size_t>(n), true),
                       clean_model, noise, seed};
  for (Index col : replaced) out.inlier_mask[static_cast<std::size_t>(col)] = false;
  return out;
}

CorruptedDataset generate_dataset(const CleanModel& model, Index n, double epsilon,
                                  const NoiseModel& noise, const AdversaryStrategy& strategy,
                                  Seed seed) {
  CleanSample clean = generate_clean(model, n, derive_seed(seed, {1}));
  Matrix noisy = apply_noise(clean.X, noise, derive_seed(seed, {2}));
  CorruptedDataset out = apply_adversary(std::move(noisy), epsilon, strategy, model, noise, derive_seed(seed, {3}));
  out.seed = seed;
  return out;
}

Matrix pairwise_difference(const Matrix& X) {
  if (X.cols() % 2 != 0) {
    fail(ErrorCode::odd_sample_count, "pairwise differences need an even sample count, got " +
                                          std::to_string(X.cols()));
  }
  const Index half = X.cols() / 2;
  Matrix out(X.rows(), half);
  for (Index i = 0; i < half; ++i) out.col(i) = X.col(2 * i) - X.col(2 * i + 1);
  return out;
}

CorruptedDataset pairwise_difference(const CorruptedDataset& dataset) {
  Matrix diffs = pairwise_difference(dataset.X);
  const Index half = diffs.cols();
  std::vector<bool> mask(static_cast<std::size_t>(half));
  for (Index i = 0; i < half; ++i) {
    mask[static_cast<std::size_t>(i)] = dataset.inlier_mask[static_cast<std::size_t>(2 * i)] &&
                                        dataset.inlier_mask[static_cast<std::size_t>(2 * i + 1)];
  }
  CleanModel clean = dataset.clean_model;
  for (double& g : clean.eigenvalues) g *= 2.0;
  return CorruptedDataset{std::move(diffs), 2.0 * dataset.epsilon, std::move(mask), std::move(clean),
                          dataset.noise_model.scaled(2.0), dataset.seed};
}

SmallBallReport small_ball_diagnostic(const Matrix& W, double t0, Index trials, Seed seed) {
  if (W.cols() < 1 || W.rows() < 1) fail(ErrorCode::empty_input, "no normalized samples");
  if (trials < 1) fail(ErrorCode::invalid_argument, "need at least one direction");
  const double n = static_cast<double>(W.cols());
  const double cutoff = 0.5 * t0;

  std::mt19937_64 rng(seed);
  SmallBallReport report;
  report.min_fraction = 1.0;
  for (Index t = 0; t < trials; ++t) {
    Vector v = standard_normal(W.rows(), 1, rng);
    v.normalize();
    const Vector proj = W.transpose() * v;
    const auto hits = (proj.array().abs() >= cutoff).count();
    report.min_fraction = std::min(report.min_fraction, static_cast<double>(hits) / n);
  }

  const Matrix cov = (W * W.transpose()) / n;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = std::max(0.0, eig.eigenvalues()(0));
  return report;
}

}  // namespace rsr
