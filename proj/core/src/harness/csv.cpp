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

#include "rsr/harness/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>
#include <type_traits>

#include "rsr/error.hpp"

namespace rsr::harness {
namespace {

template <typename T>
void append_number(std::string& out, T value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

template <typename T>
void append_optional(std::string& out, const std::optional<T>& value) {
  out.push_back(',');
  if (!value) return;
  if constexpr (std::is_same_v<T, bool>) {
    out += *value ? "true" : "false";
  } else {
    append_number(out, *value);
  }
}

template <typename T>
T parse_number(const std::string& field, std::string_view column) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    fail(ErrorCode::schema_error, "column " + std::string(column) + ": cannot parse '" + field + "'");
  }
  return value;
}

template <typename T>
std::optional<T> parse_optional(const std::string& field, std::string_view column) {
  if (field.empty()) return std::nullopt;
  if constexpr (std::is_same_v<T, bool>) {
    if (field == "true") return true;
    if (field == "false") return false;
    fail(ErrorCode::schema_error, "column " + std::string(column) + ": expected true/false, got '" + field + "'");
  } else {
    return parse_number<T>(field, column);
  }
}

}  // namespace

std::string format_double(double value) {
  std::string out;
  append_number(out, value);
  return out;
}

std::string csv_header() {
  std::string out;
  for (std::size_t i = 0; i < kRecordColumns.size(); ++i) {
    if (i) out.push_back(',');
    out += kRecordColumns[i];
  }
  return out;
}

std::string to_csv_row(const ExperimentRecord& r) {
  std::string out = r.preset;
  out.push_back(',');
  append_number(out, r.trial_index);
  out.push_back(',');
  append_number(out, r.seed);
  out.push_back(',');
  out += r.method;
  out.push_back(',');
  append_number(out, r.d);
  out.push_back(',');
  append_number(out, r.n);
  out.push_back(',');
  append_number(out, r.r_star);
  out.push_back(',');
  append_number(out, r.epsilon);
  out.push_back(',');
  append_number(out, r.sigma2);
  append_optional(out, r.r_hat);
  append_optional(out, r.r_tilde);
  append_optional(out, r.subspace_error);
  append_optional(out, r.medres_final);
  append_optional(out, r.gap_found);
  append_optional(out, r.capped);
  append_optional(out, r.runtime_ms_stage1);
  append_optional(out, r.runtime_ms_stage2);
  append_optional(out, r.runtime_ms_total);
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

ExperimentRecord parse_csv_row(std::string_view line) {
  const auto f = split_csv_line(line);
  if (f.size() != kRecordColumns.size()) {
    fail(ErrorCode::schema_error, "expected " + std::to_string(kRecordColumns.size()) + " fields, got " +
                                      std::to_string(f.size()));
  }
  const auto& col = kRecordColumns;
  ExperimentRecord r;
  r.preset = f[0];
  r.trial_index = parse_number<Index>(f[1], col[1]);
  r.seed = parse_number<Seed>(f[2], col[2]);
  r.method = f[3];
  r.d = parse_number<Index>(f[4], col[4]);
  r.n = parse_number<Index>(f[5], col[5]);
  r.r_star = parse_number<Index>(f[6], col[6]);
  r.epsilon = parse_number<double>(f[7], col[7]);
  r.sigma2 = parse_number<double>(f[8], col[8]);
  r.r_hat = parse_optional<Index>(f[9], col[9]);
  r.r_tilde = parse_optional<Index>(f[10], col[10]);
  r.subspace_error = parse_optional<double>(f[11], col[11]);
  r.medres_final = parse_optional<double>(f[12], col[12]);
  r.gap_found = parse_optional<bool>(f[13], col[13]);
  r.capped = parse_optional<bool>(f[14], col[14]);
  r.runtime_ms_stage1 = parse_optional<std::int64_t>(f[15], col[15]);
  r.runtime_ms_stage2 = parse_optional<std::int64_t>(f[16], col[16]);
  r.runtime_ms_total = parse_optional<std::int64_t>(f[17], col[17]);
  return r;
}

std::vector<ExperimentRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::schema_error, "'" + path + "' is empty");
  if (line != csv_header()) fail(ErrorCode::schema_error, "'" + path + "' does not have the experiment header");
  std::vector<ExperimentRecord> records;
  Index line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(parse_csv_row(line));
    } catch (const Error& e) {
      fail(ErrorCode::schema_error, path + ":" + std::to_string(line_no) + ": " + e.detail());
    }
  }
  return records;
}

}  // namespace rsr::harness
