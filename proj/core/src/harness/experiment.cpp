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

#include "rsr/harness/experiment.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "rsr/baselines.hpp"
#include "rsr/error.hpp"
#include "rsr/pipeline.hpp"

namespace rsr::harness {
namespace {

using Clock = std::chrono::steady_clock;

ExperimentRecord blank_record(const ExperimentSpec& spec, const GridCell& cell, Index trial, Seed seed,
                              Method method, const CorruptedDataset& data) {
  ExperimentRecord r;
  r.preset = std::string(preset_name(spec.preset));
  r.trial_index = trial;
  r.seed = seed;
  r.method = std::string(method_name(method));
  r.d = data.d();
  r.n = data.n();
  r.r_star = cell.r_star;
  r.epsilon = cell.epsilon;
  r.sigma2 = cell.sigma2;
  return r;
}

void run_method(const ExperimentSpec& spec, Method method, const CorruptedDataset& data, Seed seed,
                ExperimentRecord& rec) {
  const SubspaceBasis& truth = data.clean_model.u_star;
  switch (method) {
    case Method::ransac_plus: {
      RansacPlusConfig config = spec.ransac_plus;
      config.stage2.threads = 1;
      const double eps = spec.assumed_epsilon.value_or(data.epsilon);
      const RecoveryResult res = ransac_plus(data.X, data.noise_model, eps, config, derive_seed(seed, {2}));
      rec.r_hat = res.r_hat;
      rec.r_tilde = res.r_tilde;
      rec.subspace_error = subspace_distance(res.basis, truth);
      rec.medres_final = res.stage1.medres_trace.back().medres;
      rec.gap_found = res.stage2.gap_found;
      rec.capped = res.stage2.capped;
      if (spec.timing) {
        rec.runtime_ms_stage1 = whole_ms(res.wall_times.stage1);
        rec.runtime_ms_stage2 = whole_ms(res.wall_times.stage2);
        rec.runtime_ms_total = whole_ms(res.wall_times.total);
      }
      return;
    }
    case Method::classic_ransac: {
      const auto start = Clock::now();
      ClassicRansacConfig config;
      config.r = data.clean_model.r_star() + spec.baseline.r_offset;
      config.dist_threshold = spec.baseline.dist_threshold.value_or(default_dist_threshold(data.X, data.noise_model));
      config.consensus_fraction = spec.baseline.consensus_fraction;
      config.max_iters = spec.baseline.max_iters;
      config.seed = derive_seed(seed, {3});
      const ClassicRansacResult res = classic_ransac(data.X, config);
      rec.subspace_error = subspace_distance(res.basis, truth);
      if (spec.timing) rec.runtime_ms_total = whole_ms(Clock::now() - start);
      return;
    }
    case Method::oracle_pca: {
      const auto start = Clock::now();
      const SubspaceBasis basis = oracle_pca(data.X, data.inlier_mask, data.clean_model.r_star());
      rec.subspace_error = subspace_distance(basis, truth);
      if (spec.timing) rec.runtime_ms_total = whole_ms(Clock::now() - start);
      return;
    }
  }
}

}  // namespace

GridCell grid_cell(const ExperimentSpec& spec, Index cell_index) {
  if (cell_index < 0 || cell_index >= spec.cell_count()) fail(ErrorCode::invalid_argument, "cell index out of range");
  const auto ns = static_cast<Index>(spec.sigma2s.size());
  const auto ne = static_cast<Index>(spec.epsilons.size());
  const Index si = cell_index % ns;
  const Index ei = (cell_index / ns) % ne;
  const Index ri = cell_index / (ns * ne);
  return {spec.r_stars[static_cast<std::size_t>(ri)], spec.epsilons[static_cast<std::size_t>(ei)],
          spec.sigma2s[static_cast<std::size_t>(si)]};
}

Seed trial_seed(const ExperimentSpec& spec, Index cell_index, Index trial_index) {
  return derive_seed(spec.master_seed,
                     {static_cast<std::uint64_t>(cell_index), static_cast<std::uint64_t>(trial_index)});
}

std::vector<ExperimentRecord> run_trial(const ExperimentSpec& spec, Index cell_index, Index trial_index) {
  const GridCell cell = grid_cell(spec, cell_index);
  const Seed seed = trial_seed(spec, cell_index, trial_index);
  const CleanModel clean = random_clean_model(
      spec.d, std::vector<double>(static_cast<std::size_t>(cell.r_star), spec.clean_eigenvalue), derive_seed(seed, {0}));
  const NoiseModel noise = cell.sigma2 > 0.0 ? NoiseModel::isotropic(cell.sigma2, spec.d) : NoiseModel::zero();
  const CorruptedDataset data =
      generate_dataset(clean, spec.n, cell.epsilon, noise, spec.adversary, derive_seed(seed, {1}));

  std::vector<ExperimentRecord> out;
  for (Method m : spec.methods) {
    ExperimentRecord rec = blank_record(spec, cell, trial_index, seed, m, data);
    try {
      run_method(spec, m, data, seed, rec);
    } catch (const StageTwoError& e) {
      // Stage 1 finished, so its outputs are still data points.
      rec = blank_record(spec, cell, trial_index, seed, m, data);
      rec.r_hat = e.stage1().r_hat;
      rec.medres_final = e.stage1().medres_trace.back().medres;
      std::cerr << "warning: " << method_name(m) << " failed (cell " << cell_index << ", trial " << trial_index
                << "): " << e.what() << '\n';
    } catch (const Error& e) {
      rec = blank_record(spec, cell, trial_index, seed, m, data);
      std::cerr << "warning: " << method_name(m) << " failed (cell " << cell_index << ", trial " << trial_index
                << "): " << e.what() << '\n';
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentSpec& spec, const RecordSink& sink) {
  spec.validate();

  std::optional<std::ofstream> csv;
  if (!spec.output_path.empty()) {
    csv.emplace(spec.output_path, std::ios::trunc);
    if (!*csv) fail(ErrorCode::io_error, "cannot open '" + spec.output_path + "' for writing");
    *csv << csv_header() << '\n' << std::flush;
  }

  const Index units = spec.cell_count() * spec.trials;
  std::vector<std::optional<std::vector<ExperimentRecord>>> slots(static_cast<std::size_t>(units));
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<Index> next{0};
  std::exception_ptr worker_error;

  auto worker = [&] {
    while (true) {
      const Index u = next.fetch_add(1);
      if (u >= units) return;
      std::vector<ExperimentRecord> records;
      try {
        records = run_trial(spec, u / spec.trials, u % spec.trials);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!worker_error) worker_error = std::current_exception();
        next = units;
        slots[static_cast<std::size_t>(u)].emplace();
        ready.notify_all();
        return;
      }
      std::lock_guard lock(mutex);
      slots[static_cast<std::size_t>(u)] = std::move(records);
      ready.notify_all();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(units)));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);

  // Single writer: emit units strictly in canonical order as they complete.
  std::vector<ExperimentRecord> all;
  try {
    for (Index u = 0; u < units; ++u) {
      std::vector<ExperimentRecord> records;
      {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] { return slots[static_cast<std::size_t>(u)].has_value() || worker_error; });
        if (worker_error) break;
        records = std::move(*slots[static_cast<std::size_t>(u)]);
        slots[static_cast<std::size_t>(u)].reset();
      }
      for (auto& rec : records) {
        if (csv) {
          *csv << to_csv_row(rec) << '\n' << std::flush;
          if (!*csv) fail(ErrorCode::io_error, "write to '" + spec.output_path + "' failed");
        }
        if (sink) sink(rec);
        all.push_back(std::move(rec));
      }
    }
  } catch (...) {
    next = units;
    for (auto& t : pool) t.join();
    throw;
  }
  for (auto& t : pool) t.join();
  if (worker_error) std::rethrow_exception(worker_error);
  return all;
}

}  // namespace rsr::harness
