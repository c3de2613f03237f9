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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsr/datagen.hpp"
#include "rsr/pipeline.hpp"

namespace rsr::harness {

enum class Preset { fig1_eps_sweep, fig2_dim_misspec, fig2_noise_sweep, fig2_runtime, fig4_heatmap, custom };
enum class Method { ransac_plus, classic_ransac, oracle_pca };

std::string_view preset_name(Preset p);
Preset parse_preset(std::string_view name);  // throws config_error
std::string_view method_name(Method m);
Method parse_method(std::string_view name);  // throws config_error

/// Classic RANSAC knobs. The search dimension is r* + r_offset.
struct BaselineSettings {
  Index r_offset = 0;
  std::optional<double> dist_threshold;  // default_dist_threshold() when unset
  double consensus_fraction = 0.5;
  Index max_iters = 100'000;
};

/// A sweep: every (r*, epsilon, sigma2) grid cell, `trials` seeded trials per
/// cell, every listed method per trial.
struct ExperimentSpec {
  Preset preset = Preset::custom;
  Index d = 100;
  Index n = 500;
  std::vector<Index> r_stars{10};
  std::vector<double> epsilons{0.0};
  std::vector<double> sigma2s{0.0};
  Index trials = 20;
  Seed master_seed = 20240521;
  std::vector<Method> methods{Method::ransac_plus};
  AdversaryStrategy adversary = AdversaryStrategy::orthogonal_lowrank(2, 10.0);
  double clean_eigenvalue = 1.0;  // every nonzero eigenvalue of the clean covariance
  RansacPlusConfig ransac_plus;
  /// Overrides the epsilon handed to stage 2 (otherwise the cell's true epsilon).
  std::optional<double> assumed_epsilon;
  BaselineSettings baseline;
  /// Write runtime columns. Off makes the CSV a pure function of these settings.
  bool timing = true;
  unsigned threads = 1;
  std::string output_path;

  Index cell_count() const;

  /// Throws config_error (or epsilon_too_large) on an unusable spec.
  void validate() const;
};

/// Defaults for a named preset.
ExperimentSpec preset_spec(Preset preset);

/// Parses the key=value config format. Errors carry line numbers.
ExperimentSpec parse_config_text(std::string_view text);
ExperimentSpec parse_config(const std::filesystem::path& path);

/// Human-readable list of every section, key and default, for --help.
std::string config_reference();

}  // namespace rsr::harness
