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

#include "rsr/random.hpp"

#include <numeric>

#include "rsr/error.hpp"

namespace rsr {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

Seed derive_seed(Seed master, std::initializer_list<std::uint64_t> indices) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t index : indices) {
    h = mix64(h ^ mix64(index + 0x9e3779b97f4a7c15ULL));
  }
  return h;
}

IndexSampler::IndexSampler(Eigen::Index n) {
  if (n < 0) fail(ErrorCode::invalid_argument, "negative population size");
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), Eigen::Index{0});
}

}  // namespace rsr
