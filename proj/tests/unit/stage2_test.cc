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

#include "rsr/stage2.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "rsr/error.hpp"
#include "test_support.hpp"

namespace rsr {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no rsr::Error thrown";
  return ErrorCode::invalid_argument;
}

// Noiseless inliers of a planted r-dimensional subspace of R^width, expressed
// in coordinates where the coarse basis is the identity.
struct PlantedProjection {
  Matrix X_hat;
  SubspaceBasis identity;
  SubspaceBasis planted;
};

PlantedProjection planted_projection(Index width, Index r, Index n, Seed seed) {
  const CleanModel m = random_clean_model(width, std::vector<double>(static_cast<std::size_t>(r), 1.0), seed);
  return {generate_clean(m, n, seed + 1).X, SubspaceBasis(Matrix::Identity(width, width)), m.u_star};
}

TEST(Stage2SizingTest, NoCorruptionNeedsLogBatches) {
  const auto s = stage2_sizing(8, 0.0, 0.05, 2.75, 1'000'000);
  EXPECT_EQ(s.T, 3);
  EXPECT_FALSE(s.capped);
}

TEST(Stage2SizingTest, BatchSizeFromRank) {
  EXPECT_EQ(stage2_sizing(20, 0.0, 0.05, 4.0, 20000).B, 80);
  EXPECT_EQ(stage2_sizing(12, 0.0, 0.05, 2.5, 20000).B, 30);
  EXPECT_EQ(stage2_sizing(12, 0.0, 0.05, 2.75, 20000).B, 33);
  // ln(60 ln 20) = 5.19 dominates small ranks.
  EXPECT_EQ(stage2_sizing(2, 0.0, 0.05, 4.0, 20000).B, 21);
}

TEST(Stage2SizingTest, CapBinds) {
  const auto s = stage2_sizing(20, 0.2, 0.05, 4.0, 20000);
  EXPECT_EQ(s.B, 80);
  EXPECT_EQ(s.T, 20000);
  EXPECT_TRUE(s.capped);
}

TEST(Stage2SizingTest, UncappedMatchesClosedForm) {
  const auto s = stage2_sizing(12, 0.3, 0.05, 2.5, 1'000'000);
  EXPECT_EQ(s.T, static_cast<Index>(std::ceil(std::pow(1.0 / 0.67, 30) * std::log(20.0))));
  EXPECT_FALSE(s.capped);
}

TEST(Stage2SizingTest, EpsilonTooLarge) {
  EXPECT_NO_THROW(stage2_sizing(5, 0.5, 0.05, 2.75, 100));
  EXPECT_EQ(code_of([] { stage2_sizing(5, 0.95, 0.05, 2.75, 100); }), ErrorCode::epsilon_too_large);
}

TEST(DetectRankTest, NoiselessGapUsesFloor) {
  const std::vector<double> gamma{1.0, 0.9, 1e-13};
  const auto d = detect_rank(gamma, 4.0, NoiseModel::zero());
  EXPECT_EQ(d.r_tilde, 2);
  EXPECT_TRUE(d.gap_found);
}

TEST(DetectRankTest, NoGapReturnsFullRank) {
  const std::vector<double> gamma{1.0, 0.9, 0.5};
  const auto d = detect_rank(gamma, 4.0, NoiseModel::from_moments(0.01, 0.01));
  EXPECT_EQ(d.r_tilde, 3);
  EXPECT_FALSE(d.gap_found);
}

TEST(DetectRankTest, NoiseThresholdPicksSmallestIndex) {
  const std::vector<double> gamma{1.0, 0.5, 0.03, 0.02, 0.01};
  const auto d = detect_rank(gamma, 4.0, NoiseModel::from_moments(0.1, 0.01));
  EXPECT_EQ(d.r_tilde, 2);
  EXPECT_TRUE(d.gap_found);
  EXPECT_GT(gamma[1], 0.04);
}

TEST(DetectRankTest, AllInlierBatchSpectrum) {
  const double t0 = 0.25;
  const auto p = planted_projection(20, 10, 400, 3);
  Stage2Config config;
  const auto result = fine_estimate(p.X_hat, p.identity, NoiseModel::zero(), config, 4);
  ASSERT_EQ(result.gamma_hat.size(), 20u);
  EXPECT_LE(result.gamma_hat[10], 1e-12 * result.gamma_hat[0]);
  EXPECT_GE(result.gamma_hat[9], 0.5 * (t0 / 2) * (t0 / 2) * 1.0);
  EXPECT_EQ(result.r_tilde, 10);
  EXPECT_TRUE(result.gap_found);
}

TEST(FineEstimateTest, NoiselessExactRecovery) {
  const auto p = planted_projection(8, 5, 200, 5);
  const auto result = fine_estimate(p.X_hat, p.identity, NoiseModel::zero(), {}, 6);
  EXPECT_EQ(result.r_tilde, 5);
  EXPECT_LE(subspace_distance(result.lifted_basis, p.planted), 1e-8);
  EXPECT_EQ(result.T_used, 3);
  EXPECT_EQ(result.B_used, 22);
}

TEST(FineEstimateTest, LiftedBasisComposesCoarseBasis) {
  std::mt19937_64 rng(7);
  const SubspaceBasis V(testing::random_orthonormal(30, 8, rng));
  const auto p = planted_projection(8, 5, 200, 8);
  const auto result = fine_estimate(p.X_hat, V, NoiseModel::zero(), {}, 9);
  const Matrix expected = V.columns() * result.fine_basis.columns();
  EXPECT_LE((result.lifted_basis.columns() - expected).cwiseAbs().maxCoeff(), 1e-14);
  const Matrix gram = result.lifted_basis.columns().transpose() * result.lifted_basis.columns();
  EXPECT_LE((gram - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FineEstimateTest, ThreadCountDoesNotChangeResult) {
  const CleanModel m = random_clean_model(12, std::vector<double>(6, 1.0), 10);
  const auto data = generate_dataset(m, 300, 0.2, NoiseModel::isotropic(0.01, 12),
                                     AdversaryStrategy::orthogonal_lowrank(2, 10.0), 11);
  const SubspaceBasis V(Matrix::Identity(12, 12));
  Stage2Config config;
  config.epsilon = 0.2;
  config.T_cap = 500;
  const auto one = fine_estimate(data.X, V, data.noise_model, config, 12);
  for (unsigned threads : {2u, 3u, 7u}) {
    config.threads = threads;
    const auto many = fine_estimate(data.X, V, data.noise_model, config, 12);
    EXPECT_EQ(many.k, one.k);
    EXPECT_EQ(many.r_tilde, one.r_tilde);
    EXPECT_EQ(many.gamma_hat, one.gamma_hat);
    EXPECT_EQ(many.lifted_basis.columns(), one.lifted_basis.columns());
  }
}

TEST(FineEstimateTest, SpectrumInvariants) {
  const CleanModel m = random_clean_model(10, std::vector<double>(4, 1.0), 13);
  const auto data = generate_dataset(m, 200, 0.1, NoiseModel::isotropic(0.01, 10),
                                     AdversaryStrategy::orthogonal_lowrank(2, 10.0), 14);
  Stage2Config config;
  config.epsilon = 0.1;
  config.keep_spectrum = true;
  const auto result = fine_estimate(data.X, SubspaceBasis(Matrix::Identity(10, 10)), data.noise_model, config, 15);
  ASSERT_EQ(result.spectrum.rows(), result.T_used);
  ASSERT_EQ(result.spectrum.width(), 10);
  for (std::size_t i = 0; i + 1 < result.gamma_hat.size(); ++i) {
    EXPECT_GE(result.gamma_hat[i], result.gamma_hat[i + 1]);
  }
  std::vector<double> min_sq(10, INFINITY);
  for (Index j = 0; j < result.spectrum.rows(); ++j) {
    const auto row = result.spectrum.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i + 1 < row.size()) EXPECT_GE(row[i], row[i + 1]);
      EXPECT_LE(result.gamma_hat[i], row[i] * row[i] * (1 + 1e-12));
      min_sq[i] = std::min(min_sq[i], row[i] * row[i]);
    }
  }
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(result.gamma_hat[i], min_sq[i], 1e-12 * min_sq[0]);
  if (result.gap_found) {
    const auto winner = result.spectrum.row(result.k);
    const double target = winner[static_cast<std::size_t>(result.r_tilde)];
    for (Index j = 0; j < result.k; ++j) {
      EXPECT_GT(result.spectrum.row(j)[static_cast<std::size_t>(result.r_tilde)], target);
    }
  }
}

TEST(FineEstimateTest, BatchSpectraMatchSvd) {
  const auto p = planted_projection(6, 3, 60, 16);
  Stage2Config config;
  config.keep_spectrum = true;
  config.B_override = 60;
  const auto result = fine_estimate(p.X_hat, p.identity, NoiseModel::zero(), config, 17);
  const auto expected = batch_singular_values(p.X_hat, true);
  const auto row = result.spectrum.row(0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(row[i], expected[i], 1e-10);
}

TEST(FineEstimateTest, TooFewSamples) {
  const auto p = planted_projection(8, 5, 20, 18);
  EXPECT_EQ(code_of([&] { fine_estimate(p.X_hat, p.identity, NoiseModel::zero(), {}, 19); }),
            ErrorCode::insufficient_samples);
}

TEST(FineEstimateTest, ZeroDataIsDegenerate) {
  const Matrix zero = Matrix::Zero(4, 50);
  EXPECT_EQ(code_of([&] { fine_estimate(zero, SubspaceBasis(Matrix::Identity(4, 4)), NoiseModel::zero(), {}, 20); }),
            ErrorCode::degenerate_data);
}

TEST(FineEstimateTest, RowCountMustMatchBasis) {
  const auto p = planted_projection(8, 5, 200, 21);
  EXPECT_EQ(code_of([&] { fine_estimate(p.X_hat, SubspaceBasis(Matrix::Identity(9, 9)), NoiseModel::zero(), {}, 22); }),
            ErrorCode::shape_error);
}

// Doubling the noise standard deviation at a fixed coarse basis should roughly
// double the mean recovery error.
TEST(FineEstimateTest, ErrorGrowsLinearlyInNoiseScale) {
  auto mean_error = [](double sigma2) {
    double total = 0.0;
    for (Seed trial = 0; trial < 50; ++trial) {
      const CleanModel m = random_clean_model(100, std::vector<double>(10, 1.0), derive_seed(23, {trial, 0}));
      const NoiseModel noise = NoiseModel::isotropic(sigma2, 100);
      const auto data = generate_dataset(m, 500, 0.2, noise, AdversaryStrategy::orthogonal_lowrank(2, 10.0),
                                         derive_seed(23, {trial, 1}));
      std::mt19937_64 rng(derive_seed(23, {trial, 2}));
      Matrix extra = testing::gaussian_matrix(100, 2, rng);
      Matrix columns(100, 12);
      columns << m.u_star.columns(), extra;
      const SubspaceBasis V = orthonormal_basis(columns);
      Stage2Config config;
      config.epsilon = 0.2;
      const auto result = fine_estimate(project(data.X, V), V, noise, config, derive_seed(23, {trial, 3}));
      total += subspace_distance(result.lifted_basis, m.u_star);
    }
    return total / 50.0;
  };
  const double base = mean_error(0.01);
  const double doubled = mean_error(0.04);
  EXPECT_GE(doubled / base, 1.4) << base << " -> " << doubled;
  EXPECT_LE(doubled / base, 2.8) << base << " -> " << doubled;
}

TEST(SpectrumCsvTest, WritesHeaderAndRows) {
  SpectrumTable table(3, true);
  const std::vector<double> a{3.0, 2.0, 0.5};
  const std::vector<double> b{1.5, 1.0, 0.0};
  table.append_row(a);
  table.append_row(b);
  const auto path = std::filesystem::temp_directory_path() / "rsr_spectrum_test.csv";
  write_spectrum_csv(table, path);
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  std::filesystem::remove(path);
  EXPECT_THAT(lines, ::testing::ElementsAre("sigma_1,sigma_2,sigma_3", "3,2,0.5", "1.5,1,0"));
}

}  // namespace
}  // namespace rsr
