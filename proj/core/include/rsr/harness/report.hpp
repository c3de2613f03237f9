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
#include <vector>

#include "rsr/harness/csv.hpp"

namespace rsr::harness {

/// Mean and sample standard deviation over the non-empty values of a column.
struct Moments {
  Index count = 0;
  std::optional<double> mean;
  std::optional<double> std;  // 0 for a single value
};

Moments moments(const std::vector<double>& values);

/// Aggregate over every record sharing (preset, method, d, n, r*, epsilon, sigma2).
struct SummaryRow {
  std::string preset;
  std::string method;
  Index d = 0;
  Index n = 0;
  Index r_star = 0;
  double epsilon = 0.0;
  double sigma2 = 0.0;
  Index trials = 0;
  Moments subspace_error;
  Moments r_hat_ratio;  // r_hat / r*
  Moments runtime_ms_stage1;
  Moments runtime_ms_stage2;
  Moments runtime_ms_total;
};

/// Rows sorted by key; deterministic for a given record multiset.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

std::string summary_header();
std::string to_summary_row(const SummaryRow& row);

/// `runs.csv` -> `runs.summary.csv`; other names get the suffix appended.
std::filesystem::path summary_path(const std::filesystem::path& csv_path);

/// Reads an experiment CSV and writes its summary next to it. Returns the
/// summary path. Throws schema_error when the header does not match.
std::filesystem::path report_summary(const std::filesystem::path& csv_path);

}  // namespace rsr::harness
