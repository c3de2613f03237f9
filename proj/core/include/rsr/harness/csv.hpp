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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsr/random.hpp"
#include "rsr/subspace.hpp"

namespace rsr::harness {

/// Column order of the experiment CSV. Downstream tooling (plots, summaries)
/// keys on these names.
inline constexpr std::array<std::string_view, 18> kRecordColumns = {
    "preset",          "trial_index",       "seed",         "method",        "d",
    "n",               "r_star",            "epsilon",      "sigma2",        "r_hat",
    "r_tilde",         "subspace_error",    "medres_final", "gap_found",     "capped",
    "runtime_ms_stage1", "runtime_ms_stage2", "runtime_ms_total",
};

/// One CSV row. Unset optionals are written as empty fields.
struct ExperimentRecord {
  std::string preset;
  Index trial_index = 0;
  Seed seed = 0;
  std::string method;
  Index d = 0;
  Index n = 0;
  Index r_star = 0;
  double epsilon = 0.0;
  double sigma2 = 0.0;
  std::optional<Index> r_hat;
  std::optional<Index> r_tilde;
  std::optional<double> subspace_error;
  std::optional<double> medres_final;
  std::optional<bool> gap_found;
  std::optional<bool> capped;
  std::optional<std::int64_t> runtime_ms_stage1;
  std::optional<std::int64_t> runtime_ms_stage2;
  std::optional<std::int64_t> runtime_ms_total;

  bool operator==(const ExperimentRecord&) const = default;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

std::string csv_header();
std::string to_csv_row(const ExperimentRecord& record);

/// Splits one line on commas. Fields never contain commas or quotes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Inverse of to_csv_row. Throws schema_error on malformed fields.
ExperimentRecord parse_csv_row(std::string_view line);

/// Reads a whole experiment CSV, checking the header. Throws io_error or schema_error.
std::vector<ExperimentRecord> read_records(const std::string& path);

}  // namespace rsr::harness
