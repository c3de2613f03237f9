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

#include "rsr/harness/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include "rsr/error.hpp"

namespace rsr::harness {
namespace {

using Key = std::tuple<std::string, std::string, Index, Index, Index, double, double>;

struct Accumulator {
  Index trials = 0;
  std::vector<double> error, ratio, stage1, stage2, total;
};

void append_moments(std::string& out, const Moments& m) {
  out.push_back(',');
  if (m.mean) out += format_double(*m.mean);
  out.push_back(',');
  if (m.std) out += format_double(*m.std);
}

}  // namespace

Moments moments(const std::vector<double>& values) {
  Moments m;
  m.count = static_cast<Index>(values.size());
  if (values.empty()) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  m.mean = mean;
  m.std = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  return m;
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  std::map<Key, Accumulator> groups;
  for (const auto& r : records) {
    auto& acc = groups[Key{r.preset, r.method, r.d, r.n, r.r_star, r.epsilon, r.sigma2}];
    ++acc.trials;
    if (r.subspace_error) acc.error.push_back(*r.subspace_error);
    if (r.r_hat) acc.ratio.push_back(static_cast<double>(*r.r_hat) / static_cast<double>(r.r_star));
    if (r.runtime_ms_stage1) acc.stage1.push_back(static_cast<double>(*r.runtime_ms_stage1));
    if (r.runtime_ms_stage2) acc.stage2.push_back(static_cast<double>(*r.runtime_ms_stage2));
    if (r.runtime_ms_total) acc.total.push_back(static_cast<double>(*r.runtime_ms_total));
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, acc] : groups) {
    SummaryRow row;
    std::tie(row.preset, row.method, row.d, row.n, row.r_star, row.epsilon, row.sigma2) = key;
    row.trials = acc.trials;
    row.subspace_error = moments(acc.error);
    row.r_hat_ratio = moments(acc.ratio);
    row.runtime_ms_stage1 = moments(acc.stage1);
    row.runtime_ms_stage2 = moments(acc.stage2);
    row.runtime_ms_total = moments(acc.total);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summary_header() {
  return "preset,method,d,n,r_star,epsilon,sigma2,trials,"
         "subspace_error_mean,subspace_error_std,r_hat_ratio_mean,r_hat_ratio_std,"
         "runtime_ms_stage1_mean,runtime_ms_stage1_std,runtime_ms_stage2_mean,runtime_ms_stage2_std,"
         "runtime_ms_total_mean,runtime_ms_total_std";
}

std::string to_summary_row(const SummaryRow& row) {
  std::string out = row.preset + "," + row.method + "," + std::to_string(row.d) + "," + std::to_string(row.n) + "," +
                    std::to_string(row.r_star) + "," + format_double(row.epsilon) + "," +
                    format_double(row.sigma2) + "," + std::to_string(row.trials);
  append_moments(out, row.subspace_error);
  append_moments(out, row.r_hat_ratio);
  append_moments(out, row.runtime_ms_stage1);
  append_moments(out, row.runtime_ms_stage2);
  append_moments(out, row.runtime_ms_total);
  return out;
}

std::filesystem::path summary_path(const std::filesystem::path& csv_path) {
  std::filesystem::path out = csv_path;
  if (out.extension() == ".csv") out.replace_extension();
  out += ".summary.csv";
  return out;
}

std::filesystem::path report_summary(const std::filesystem::path& csv_path) {
  const auto rows = summarize(read_records(csv_path.string()));
  const auto out_path = summary_path(csv_path);
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot open '" + out_path.string() + "' for writing");
  out << summary_header() << '\n';
  for (const auto& row : rows) out << to_summary_row(row) << '\n';
  if (!out) fail(ErrorCode::io_error, "write to '" + out_path.string() + "' failed");
  return out_path;
}

}  // namespace rsr::harness
