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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>

#include "rsr/error.hpp"

namespace rsr {
namespace {

Index sizing_T(Index B, double epsilon, double delta, Index T_cap, bool& capped) {
  const double keep = 1.0 - 1.1 * epsilon;
  if (!(keep > 0.0)) {
    fail(ErrorCode::epsilon_too_large, "1 - 1.1 * epsilon must be positive, epsilon = " + std::to_string(epsilon));
  }
  // Work in log space: (1 / keep)^B overflows long before T_cap matters.
  const double log_T = -static_cast<double>(B) * std::log(keep) + std::log(std::log(1.0 / delta));
  if (log_T >= std::log(static_cast<double>(T_cap))) {
    capped = log_T > std::log(static_cast<double>(T_cap));
    return T_cap;
  }
  capped = false;
  return std::max<Index>(1, static_cast<Index>(std::ceil(std::exp(log_T))));
}

// Running per-index minima of the squared batch spectra over a contiguous range
// of batch indices, with the first batch index attaining each minimum.
struct BatchScan {
  std::vector<double> min_sq;
  std::vector<Index> argmin;
  std::vector<double> rows;  // flattened spectra, only when kept
};

void draw_batch(const Eigen::Ref<const Matrix>& X_hat, Seed seed, Index j, Index B, IndexSampler& sampler,
                Matrix& out) {
  SplitMix64 rng(derive_seed(seed, {static_cast<std::uint64_t>(j)}));
  const auto cols = sampler.draw(B, rng);
  for (Index c = 0; c < B; ++c) out.col(c) = X_hat.col(cols[static_cast<std::size_t>(c)]);
}

BatchScan scan_batches(const Eigen::Ref<const Matrix>& X_hat, Seed seed, Index first, Index last, Index B,
                       bool normalize, bool keep) {
  const Index width = X_hat.rows();
  BatchScan scan{std::vector<double>(static_cast<std::size_t>(width), std::numeric_limits<double>::infinity()),
                 std::vector<Index>(static_cast<std::size_t>(width), first), {}};
  if (keep) scan.rows.reserve(static_cast<std::size_t>((last - first) * width));

  IndexSampler sampler(X_hat.cols());
  Matrix batch(width, B);
  Matrix gram(width, width);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(width);
  const double scale = normalize ? 1.0 / static_cast<double>(B) : 1.0;
  for (Index j = first; j < last; ++j) {
    draw_batch(X_hat, seed, j, B, sampler, batch);
    // Squared singular values of the batch are the eigenvalues of its Gram
    // matrix; the r_hat x r_hat eigenproblem is much cheaper than an SVD.
    gram.setZero();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(batch);
    eig.compute(gram, Eigen::EigenvaluesOnly);
    const Vector& ascending = eig.eigenvalues();
    for (Index i = 0; i < width; ++i) {
      const double sq = std::max(ascending(width - 1 - i), 0.0) * scale;
      auto slot = static_cast<std::size_t>(i);
      if (sq < scan.min_sq[slot]) {
        scan.min_sq[slot] = sq;
        scan.argmin[slot] = j;
      }
      if (keep) scan.rows.push_back(std::sqrt(sq));
    }
  }
  return scan;
}

}  // namespace

void Stage2Config::validate() const {
  if (!(C_prime > 0.0)) fail(ErrorCode::invalid_argument, "C_prime must be positive");
  if (!(batch_factor > 0.0)) fail(ErrorCode::invalid_argument, "batch_factor must be positive");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::invalid_argument, "delta must lie in (0, 1)");
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) fail(ErrorCode::invalid_argument, "stage2 epsilon must lie in [0, 0.5]");
  if (T_cap < 1) fail(ErrorCode::invalid_argument, "T_cap must be at least 1");
  if (B_override && *B_override < 1) fail(ErrorCode::invalid_argument, "B override must be positive");
  if (threads < 1) fail(ErrorCode::invalid_argument, "threads must be at least 1");
}

Stage2Sizing stage2_sizing(Index r_hat, double epsilon, double delta, double batch_factor, Index T_cap) {
  if (r_hat < 1) fail(ErrorCode::invalid_argument, "r_hat must be positive");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::invalid_argument, "delta must lie in (0, 1)");
  if (T_cap < 1) fail(ErrorCode::invalid_argument, "T_cap must be at least 1");
  const double confidence_floor = std::log((3.0 / delta) * std::log(1.0 / delta));
  const double raw_B = batch_factor * std::max(static_cast<double>(r_hat), confidence_floor);
  // The slack keeps products like 2.5 * 12 from rounding up to 31.
  Stage2Sizing s;
  s.B = static_cast<Index>(std::ceil(raw_B * (1.0 - 1e-12)));
  s.T = sizing_T(s.B, epsilon, delta, T_cap, s.capped);
  return s;
}

RankDecision detect_rank(std::span<const double> gamma_hat, double C_prime, const NoiseModel& noise) {
  if (gamma_hat.empty()) fail(ErrorCode::invalid_argument, "gamma_hat is empty");
  const double threshold = std::max(C_prime * noise.spectral_norm, 1e-12 * gamma_hat[0]);
  for (std::size_t r = 0; r < gamma_hat.size(); ++r) {
    if (gamma_hat[r] <= threshold) return {static_cast<Index>(r), true};
  }
  return {static_cast<Index>(gamma_hat.size()), false};
}

Stage2Result fine_estimate(const Eigen::Ref<const Matrix>& X_hat, const SubspaceBasis& V, const NoiseModel& noise,
                           const Stage2Config& config, Seed seed) {
  config.validate();
  const Index r_hat = X_hat.rows();
  const Index n = X_hat.cols();
  if (r_hat != V.r()) {
    fail(ErrorCode::shape_error, "projected data has " + std::to_string(r_hat) + " rows, basis has " +
                                     std::to_string(V.r()) + " columns");
  }

  Stage2Sizing sizing;
  if (config.B_override) {
    sizing.B = *config.B_override;
    sizing.T = sizing_T(sizing.B, config.epsilon, config.delta, config.T_cap, sizing.capped);
  } else {
    sizing = stage2_sizing(r_hat, config.epsilon, config.delta, config.batch_factor, config.T_cap);
  }
  const Index B = sizing.B;
  const Index T = sizing.T;
  if (n < B) {
    fail(ErrorCode::insufficient_samples,
         "stage 2 batch size " + std::to_string(B) + " exceeds sample count " + std::to_string(n));
  }

  const Index workers = std::clamp<Index>(static_cast<Index>(config.threads), 1, T);
  std::vector<BatchScan> scans(static_cast<std::size_t>(workers));
  auto bounds = [&](Index w) { return std::pair<Index, Index>{T * w / workers, T * (w + 1) / workers}; };
  if (workers == 1) {
    scans[0] = scan_batches(X_hat, seed, 0, T, B, config.normalize_spectra, config.keep_spectrum);
  } else {
    std::vector<std::thread> pool;
    for (Index w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const auto [first, last] = bounds(w);
        scans[static_cast<std::size_t>(w)] =
            scan_batches(X_hat, seed, first, last, B, config.normalize_spectra, config.keep_spectrum);
      });
    }
    for (auto& t : pool) t.join();
  }

  // Merge in batch-index order; a strict comparison keeps the earliest batch on ties.
  std::vector<double> gamma_hat = scans[0].min_sq;
  std::vector<Index> argmin = scans[0].argmin;
  for (std::size_t w = 1; w < scans.size(); ++w) {
    for (std::size_t i = 0; i < gamma_hat.size(); ++i) {
      if (scans[w].min_sq[i] < gamma_hat[i]) {
        gamma_hat[i] = scans[w].min_sq[i];
        argmin[i] = scans[w].argmin[i];
      }
    }
  }

  SpectrumTable spectrum;
  if (config.keep_spectrum) {
    spectrum = SpectrumTable(r_hat, config.normalize_spectra);
    spectrum.reserve(T);
    for (const auto& scan : scans) {
      for (std::size_t off = 0; off < scan.rows.size(); off += static_cast<std::size_t>(r_hat)) {
        spectrum.append_row(std::span<const double>(scan.rows.data() + off, static_cast<std::size_t>(r_hat)));
      }
    }
  }

  const RankDecision decision = detect_rank(gamma_hat, config.C_prime, noise);
  if (decision.r_tilde == 0) {
    fail(ErrorCode::degenerate_data, "every batch direction falls under the noise threshold");
  }
  // Without a gap, the (r_hat + 1)-th singular value is zero for every batch.
  const Index k = decision.gap_found ? argmin[static_cast<std::size_t>(decision.r_tilde)] : 0;

  IndexSampler sampler(n);
  Matrix batch(r_hat, B);
  draw_batch(X_hat, seed, k, B, sampler, batch);
  SubspaceBasis fine = leading_left_singular_vectors(batch, decision.r_tilde);
  SubspaceBasis lifted = compose(V, fine);

  return Stage2Result{decision.r_tilde, k,        decision.gap_found,   sizing.capped,   T, B,
                      std::move(gamma_hat), std::move(spectrum), std::move(fine), std::move(lifted)};
}

void write_spectrum_csv(const SpectrumTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot open '" + path.string() + "' for writing");
  for (Index i = 0; i < table.width(); ++i) out << (i ? "," : "") << "sigma_" << (i + 1);
  out << '\n';
  char buf[32];
  for (Index j = 0; j < table.rows(); ++j) {
    const auto row = table.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), row[i]);
      if (i) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::io_error, "write to '" + path.string() + "' failed");
}

}  // namespace rsr
