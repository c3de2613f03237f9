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

#include <functional>
#include <vector>

#include "rsr/harness/config.hpp"
#include "rsr/harness/csv.hpp"

namespace rsr::harness {

/// Grid coordinates of a cell. Cells are enumerated r* outermost, then
/// epsilon, then sigma2.
struct GridCell {
  Index r_star = 0;
  double epsilon = 0.0;
  double sigma2 = 0.0;
};

GridCell grid_cell(const ExperimentSpec& spec, Index cell_index);

/// derive_seed(master_seed, {cell_index, trial_index}).
Seed trial_seed(const ExperimentSpec& spec, Index cell_index, Index trial_index);

/// Generates the trial's dataset and runs every method on it, in method order.
/// A method that throws yields a record with empty result fields.
std::vector<ExperimentRecord> run_trial(const ExperimentSpec& spec, Index cell_index, Index trial_index);

using RecordSink = std::function<void(const ExperimentRecord&)>;

/// Runs the whole sweep. Records reach `sink` (and the CSV at
/// spec.output_path, if set) in (cell, trial, method) order whatever the
/// thread count; the CSV is flushed after every record.
std::vector<ExperimentRecord> run_experiment(const ExperimentSpec& spec, const RecordSink& sink = {});

}  // namespace rsr::harness
