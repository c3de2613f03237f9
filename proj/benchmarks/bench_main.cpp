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

// Microbenchmarks for the hot loops: batch spectra, the doubling search, the
// stage-2 batch scan and classic RANSAC at growing target dimension.

#include <benchmark/benchmark.h>

#include <vector>

#include "rsr/baselines.hpp"
#include "rsr/datagen.hpp"
#include "rsr/stage1.hpp"
#include "rsr/stage2.hpp"

namespace {

rsr::CorruptedDataset dataset(rsr::Index d, rsr::Index r_star, double epsilon) {
  const auto clean = rsr::random_clean_model(d, std::vector<double>(static_cast<std::size_t>(r_star), 1.0), 1);
  return rsr::generate_dataset(clean, 500, epsilon, rsr::NoiseModel::zero(),
                               rsr::AdversaryStrategy::orthogonal_lowrank(2, 10.0), 2);
}

void BM_BatchSingularValues(benchmark::State& state) {
  const auto width = state.range(0);
  const rsr::Matrix batch = rsr::Matrix::Random(width, 3 * width);
  for (auto _ : state) benchmark::DoNotOptimize(rsr::batch_singular_values(batch, true));
}
BENCHMARK(BM_BatchSingularValues)->Arg(8)->Arg(12)->Arg(24)->Arg(48);

void BM_CoarseEstimate(benchmark::State& state) {
  const auto data = dataset(1000, state.range(0), 0.2);
  rsr::Seed seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rsr::coarse_estimate(data.X, data.noise_model, {}, ++seed));
}
BENCHMARK(BM_CoarseEstimate)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

// Batches per second of the stage-2 scan on a 12-dimensional projection.
void BM_FineEstimateScan(benchmark::State& state) {
  const auto data = dataset(12, 10, 0.2);
  const rsr::SubspaceBasis identity(rsr::Matrix::Identity(12, 12));
  rsr::Stage2Config config;
  config.epsilon = 0.3;
  config.T_cap = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(rsr::fine_estimate(data.X, identity, data.noise_model, config, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FineEstimateScan)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ClassicRansac(benchmark::State& state) {
  const auto r = state.range(0);
  const auto data = dataset(1000, r, 0.2);
  rsr::ClassicRansacConfig config;
  config.r = r;
  config.dist_threshold = rsr::default_dist_threshold(data.X, data.noise_model);
  for (auto _ : state) {
    ++config.seed;
    benchmark::DoNotOptimize(rsr::classic_ransac(data.X, config));
  }
}
BENCHMARK(BM_ClassicRansac)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
