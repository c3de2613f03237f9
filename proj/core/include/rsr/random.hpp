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

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rsr/error.hpp"

namespace rsr {

using Seed = std::uint64_t;

// SplitMix64 output finalizer (Steele, Lea, Flood 2014). Bijective on 64 bits.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Derives an independent stream seed from a master seed and a list of stream
// indices: h0 = mix64(master), h_{k+1} = mix64(h_k ^ mix64(index_k + phi))
// with phi = 0x9e3779b97f4a7c15. Stable across releases; replays depend on it.
Seed derive_seed(Seed master, std::initializer_list<std::uint64_t> indices) noexcept;

// Minimal UniformRandomBitGenerator over the SplitMix64 sequence. Cheap to
// construct, used for the many short per-batch streams.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(Seed seed) noexcept : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// Draws k distinct indices from [0, n) uniformly. The internal permutation is
// restored after each draw, so the result depends only on the engine state.
class IndexSampler {
 public:
  explicit IndexSampler(Eigen::Index n);

  Eigen::Index population() const noexcept { return static_cast<Eigen::Index>(perm_.size()); }

  template <typename Engine>
  std::span<const Eigen::Index> draw(Eigen::Index k, Engine& engine) {
    const auto n = population();
    if (k < 0 || k > n) fail(ErrorCode::invalid_argument, "sample size exceeds population");
    out_.resize(static_cast<std::size_t>(k));
    swaps_.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
      std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
      const Eigen::Index j = pick(engine);
      std::swap(perm_[i], perm_[j]);
      swaps_[i] = j;
      out_[i] = perm_[i];
    }
    for (Eigen::Index i = k - 1; i >= 0; --i) std::swap(perm_[i], perm_[swaps_[i]]);
    return out_;
  }

 private:
  std::vector<Eigen::Index> perm_;
  std::vector<Eigen::Index> swaps_;
  std::vector<Eigen::Index> out_;
};

template <typename Engine>
std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, Eigen::Index k, Engine& engine) {
  IndexSampler sampler(n);
  auto drawn = sampler.draw(k, engine);
  return {drawn.begin(), drawn.end()};
}

}  // namespace rsr
