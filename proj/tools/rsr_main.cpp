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

// Command line front end: dataset generation, single runs, sweeps, summaries.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rsr/dataset_io.hpp"
#include "rsr/error.hpp"
#include "rsr/harness/config.hpp"
#include "rsr/harness/experiment.hpp"
#include "rsr/harness/report.hpp"
#include "rsr/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct GenerateArgs {
  rsr::Index d = 100;
  rsr::Index n = 500;
  rsr::Index r_star = 10;
  double epsilon = 0.2;
  double sigma2 = 0.0;
  double eigenvalue = 1.0;
  std::string adversary = "orthogonal_lowrank";
  rsr::Index adversary_rank = 2;
  double adversary_scale = 10.0;
  std::uint64_t seed = 1;
};

void add_generate_options(CLI::App& cmd, GenerateArgs& g) {
  cmd.add_option("--d", g.d, "Ambient dimension")->capture_default_str();
  cmd.add_option("--n", g.n, "Sample count")->capture_default_str();
  cmd.add_option("--r-star", g.r_star, "True subspace dimension")->capture_default_str();
  cmd.add_option("--epsilon", g.epsilon, "Corruption fraction")->capture_default_str();
  cmd.add_option("--sigma2", g.sigma2, "Noise trace; Sigma_xi = (sigma2/d) I")->capture_default_str();
  cmd.add_option("--eigenvalue", g.eigenvalue, "Clean covariance eigenvalue")->capture_default_str();
  cmd.add_option("--adversary", g.adversary, "none | orthogonal_lowrank | inlier_mimic | point_mass")
      ->capture_default_str();
  cmd.add_option("--adversary-rank", g.adversary_rank, "Outlier covariance rank")->capture_default_str();
  cmd.add_option("--adversary-scale", g.adversary_scale, "Outlier covariance eigenvalue")->capture_default_str();
  cmd.add_option("--seed", g.seed, "Seed")->capture_default_str();
}

rsr::AdversaryStrategy adversary_from(const GenerateArgs& g) {
  rsr::AdversaryStrategy s;
  s.kind = rsr::parse_adversary_kind(g.adversary);
  s.rank = g.adversary_rank;
  s.scale = g.adversary_scale;
  return s;
}

rsr::CorruptedDataset generate(const GenerateArgs& g) {
  if (g.epsilon < 0.0 || g.epsilon > 0.5) rsr::fail(rsr::ErrorCode::config_error, "--epsilon must lie in [0, 0.5]");
  if (g.r_star < 1 || g.r_star >= g.d) rsr::fail(rsr::ErrorCode::config_error, "--r-star must lie in [1, d)");
  const auto clean = rsr::random_clean_model(
      g.d, std::vector<double>(static_cast<std::size_t>(g.r_star), g.eigenvalue), rsr::derive_seed(g.seed, {0}));
  const auto noise = g.sigma2 > 0.0 ? rsr::NoiseModel::isotropic(g.sigma2, g.d) : rsr::NoiseModel::zero();
  return rsr::generate_dataset(clean, g.n, g.epsilon, noise, adversary_from(g), rsr::derive_seed(g.seed, {1}));
}

int exit_code_for(const rsr::Error& e) {
  switch (e.code()) {
    case rsr::ErrorCode::config_error:
    case rsr::ErrorCode::epsilon_too_large:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rsr: robust subspace recovery with RANSAC+"};
  app.require_subcommand(1);

  GenerateArgs gen;
  std::string gen_out;
  auto* generate_cmd = app.add_subcommand("generate", "Write a corrupted dataset container and JSON sidecar");
  add_generate_options(*generate_cmd, gen);
  generate_cmd->add_option("--out", gen_out, "Container path (sidecar goes to PATH.json)")->required();

  GenerateArgs run_gen;
  std::string run_input, run_config;
  std::optional<double> run_eps;
  unsigned run_threads = 1;
  auto* run_cmd = app.add_subcommand("run", "Run RANSAC+ once and print the result as JSON");
  add_generate_options(*run_cmd, run_gen);
  run_cmd->add_option("--input", run_input, "Dataset container; generated from the flags when omitted");
  run_cmd->add_option("--config", run_config, "Config file; only [stage1] and [stage2] are used");
  run_cmd->add_option("--assumed-epsilon", run_eps, "Epsilon handed to stage 2 (default: the dataset's)");
  run_cmd->add_option("--threads", run_threads, "Stage-2 worker threads")->capture_default_str();

  std::string sweep_config, sweep_preset, sweep_out;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<rsr::Index> sweep_trials;
  std::optional<unsigned> sweep_threads;
  bool no_timing = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment grid and write a CSV");
  sweep_cmd->add_option("--config", sweep_config, "Config file");
  sweep_cmd->add_option("--preset", sweep_preset,
                        "fig1_eps_sweep | fig2_dim_misspec | fig2_noise_sweep | fig2_runtime | fig4_heatmap | custom");
  sweep_cmd->add_option("--seed", sweep_seed, "Master seed");
  sweep_cmd->add_option("--out", sweep_out, "CSV output path");
  sweep_cmd->add_option("--threads", sweep_threads, "Worker threads");
  sweep_cmd->add_option("--trials", sweep_trials, "Trials per grid cell");
  sweep_cmd->add_flag("--no-timing", no_timing, "Leave runtime columns empty (byte-reproducible CSV)");
  sweep_cmd->footer("Config keys and defaults:\n" + rsr::harness::config_reference());

  std::string report_csv;
  auto* report_cmd = app.add_subcommand("report", "Summarize a sweep CSV into NAME.summary.csv");
  report_cmd->add_option("csv", report_csv, "Sweep CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*generate_cmd) {
      const auto data = generate(gen);
      rsr::write_dataset(data, gen_out, adversary_from(gen));
      std::cerr << "wrote " << gen_out << " (" << data.d() << " x " << data.n() << ", " << data.outlier_count()
                << " outliers)\n";
    } else if (*run_cmd) {
      const auto data = run_input.empty() ? generate(run_gen) : rsr::read_dataset(run_input);
      rsr::RansacPlusConfig config;
      if (!run_config.empty()) config = rsr::harness::parse_config(run_config).ransac_plus;
      config.stage2.threads = run_threads;
      const double eps = run_eps.value_or(data.epsilon);
      const auto result = rsr::ransac_plus(data.X, data.noise_model, eps, config, run_gen.seed);
      auto json = nlohmann::json::parse(rsr::to_json(result));
      json["subspace_error"] = rsr::subspace_distance(result.basis, data.clean_model.u_star);
      json["seed"] = run_gen.seed;
      std::cout << json.dump(2) << '\n';
    } else if (*sweep_cmd) {
      rsr::harness::ExperimentSpec spec;
      if (!sweep_config.empty()) {
        spec = rsr::harness::parse_config(sweep_config);
        if (!sweep_preset.empty() && rsr::harness::parse_preset(sweep_preset) != spec.preset) {
          rsr::fail(rsr::ErrorCode::config_error, "--preset disagrees with the config file");
        }
      } else if (!sweep_preset.empty()) {
        spec = rsr::harness::preset_spec(rsr::harness::parse_preset(sweep_preset));
      } else {
        rsr::fail(rsr::ErrorCode::config_error, "sweep needs --config or --preset");
      }
      if (sweep_seed) spec.master_seed = *sweep_seed;
      if (sweep_trials) spec.trials = *sweep_trials;
      if (sweep_threads) spec.threads = *sweep_threads;
      if (no_timing) spec.timing = false;
      if (!sweep_out.empty()) spec.output_path = sweep_out;
      if (spec.output_path.empty()) spec.output_path = std::string(rsr::harness::preset_name(spec.preset)) + ".csv";
      const auto records = rsr::harness::run_experiment(spec);
      std::cerr << "wrote " << records.size() << " records to " << spec.output_path << '\n';
    } else if (*report_cmd) {
      std::cout << rsr::harness::report_summary(report_csv).string() << '\n';
    }
  } catch (const rsr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
