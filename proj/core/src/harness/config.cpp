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

#include "rsr/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <system_error>

#include "rsr/error.hpp"

namespace rsr::harness {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_scalar(std::string_view text) {
  text = trim(text);
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    fail(ErrorCode::config_error, "cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_scalar<T>(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  fail(ErrorCode::config_error, "cannot parse '" + std::string(text) + "' as a boolean");
}

using Setter = std::function<void(ExperimentSpec&, std::string_view)>;

struct KeyInfo {
  Setter set;
  std::string_view help;
};

const std::map<std::string, std::map<std::string, KeyInfo>>& key_table() {
  static const std::map<std::string, std::map<std::string, KeyInfo>> table = {
      {"experiment",
       {
           {"preset", {[](auto&, auto) {}, "fig1_eps_sweep | fig2_dim_misspec | fig2_noise_sweep | fig2_runtime | fig4_heatmap | custom (default custom)"}},
           {"trials", {[](auto& s, auto v) { s.trials = parse_scalar<Index>(v); }, "trials per grid cell (20)"}},
           {"seed", {[](auto& s, auto v) { s.master_seed = parse_scalar<Seed>(v); }, "master seed (20240521)"}},
           {"d", {[](auto& s, auto v) { s.d = parse_scalar<Index>(v); }, "ambient dimension (100)"}},
           {"n", {[](auto& s, auto v) { s.n = parse_scalar<Index>(v); }, "samples per dataset (500)"}},
           {"r_star", {[](auto& s, auto v) { s.r_stars = parse_list<Index>(v); }, "true ranks, comma list (10)"}},
           {"epsilon", {[](auto& s, auto v) { s.epsilons = parse_list<double>(v); }, "corruption fractions, comma list, each <= 0.5 (0)"}},
           {"sigma2", {[](auto& s, auto v) { s.sigma2s = parse_list<double>(v); }, "noise traces, Sigma_xi = (sigma2/d) I, comma list (0)"}},
           {"methods",
            {[](auto& s, auto v) {
               s.methods.clear();
               std::size_t start = 0;
               while (true) {
                 const auto comma = v.find(',', start);
                 s.methods.push_back(parse_method(trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start))));
                 if (comma == std::string_view::npos) break;
                 start = comma + 1;
               }
             },
             "ransac_plus, classic_ransac, oracle_pca (ransac_plus)"}},
           {"output", {[](auto& s, auto v) { s.output_path = std::string(trim(v)); }, "CSV path (none; --out)"}},
           {"adversary",
            {[](auto& s, auto v) { s.adversary.kind = parse_adversary_kind(trim(v)); },
             "none | orthogonal_lowrank | inlier_mimic | point_mass (orthogonal_lowrank)"}},
           {"adversary_rank", {[](auto& s, auto v) { s.adversary.rank = parse_scalar<Index>(v); }, "outlier covariance rank (2)"}},
           {"adversary_scale", {[](auto& s, auto v) { s.adversary.scale = parse_scalar<double>(v); }, "outlier covariance eigenvalue (10)"}},
           {"adversary_magnitude", {[](auto& s, auto v) { s.adversary.magnitude = parse_scalar<double>(v); }, "point-mass norm (10)"}},
           {"eigenvalue", {[](auto& s, auto v) { s.clean_eigenvalue = parse_scalar<double>(v); }, "clean covariance eigenvalues (1)"}},
           {"center",
            {[](auto& s, auto v) {
               const auto t = trim(v);
               if (t == "none") s.ransac_plus.center = Centering::none;
               else if (t == "pairwise_difference") s.ransac_plus.center = Centering::pairwise_difference;
               else fail(ErrorCode::config_error, "center must be none or pairwise_difference");
             },
             "none | pairwise_difference (none)"}},
           {"timing", {[](auto& s, auto v) { s.timing = parse_bool(v); }, "write runtime columns (true)"}},
           {"threads", {[](auto& s, auto v) { s.threads = parse_scalar<unsigned>(v); }, "worker threads (1)"}},
       }},
      {"stage1",
       {
           {"C", {[](auto& s, auto v) { s.ransac_plus.stage1.C = parse_scalar<double>(v); }, "threshold constant, >= 2.2 (2.2)"}},
           {"t0", {[](auto& s, auto v) { s.ransac_plus.stage1.t0 = parse_scalar<double>(v); }, "small-ball constant (0.25)"}},
           {"eta_floor_scale", {[](auto& s, auto v) { s.ransac_plus.stage1.eta_floor_scale = parse_scalar<double>(v); }, "residual floor / median column norm (1e-9)"}},
           {"rank_tol", {[](auto& s, auto v) { s.ransac_plus.stage1.rank_tol = parse_scalar<double>(v); }, "relative rank tolerance (1e-8)"}},
           {"r_star_hint", {[](auto& s, auto v) { s.ransac_plus.stage1.r_star_hint = parse_scalar<Index>(v); }, "rank used in the threshold (unset: current batch size)"}},
           {"initial_B", {[](auto& s, auto v) { s.ransac_plus.stage1.initial_B = parse_scalar<Index>(v); }, "first batch size (2)"}},
       }},
      {"stage2",
       {
           {"C_prime", {[](auto& s, auto v) { s.ransac_plus.stage2.C_prime = parse_scalar<double>(v); }, "gap constant (4)"}},
           {"batch_factor", {[](auto& s, auto v) { s.ransac_plus.stage2.batch_factor = parse_scalar<double>(v); }, "batch size constant (2.75)"}},
           {"delta", {[](auto& s, auto v) { s.ransac_plus.stage2.delta = parse_scalar<double>(v); }, "failure probability (0.05)"}},
           {"epsilon", {[](auto& s, auto v) { s.assumed_epsilon = parse_scalar<double>(v); }, "assumed corruption fraction, <= 0.5 (unset: true epsilon)"}},
           {"T_cap", {[](auto& s, auto v) { s.ransac_plus.stage2.T_cap = parse_scalar<Index>(v); }, "maximum batch count (1000000)"}},
           {"B", {[](auto& s, auto v) { s.ransac_plus.stage2.B_override = parse_scalar<Index>(v); }, "fixed batch size (unset: sized from r_hat)"}},
           {"normalize_spectra", {[](auto& s, auto v) { s.ransac_plus.stage2.normalize_spectra = parse_bool(v); }, "divide singular values by sqrt(B) (true)"}},
       }},
      {"baseline",
       {
           {"r_offset", {[](auto& s, auto v) { s.baseline.r_offset = parse_scalar<Index>(v); }, "classic RANSAC searches r* + r_offset dimensions (0)"}},
           {"dist_threshold", {[](auto& s, auto v) { s.baseline.dist_threshold = parse_scalar<double>(v); }, "consensus residual cutoff (unset: noise-norm bound)"}},
           {"consensus_fraction", {[](auto& s, auto v) { s.baseline.consensus_fraction = parse_scalar<double>(v); }, "early-exit consensus fraction (0.5)"}},
           {"max_iters", {[](auto& s, auto v) { s.baseline.max_iters = parse_scalar<Index>(v); }, "iteration budget (100000)"}},
       }},
  };
  return table;
}

[[noreturn]] void fail_at(Index line, const std::string& msg, ErrorCode code = ErrorCode::config_error) {
  fail(code, "line " + std::to_string(line) + ": " + msg);
}

void check_epsilon(double eps, std::string_view what) {
  if (!(eps >= 0.0)) fail(ErrorCode::config_error, std::string(what) + " must be non-negative");
  if (eps > 0.5) {
    fail(ErrorCode::epsilon_too_large,
         std::string(what) + " = " + std::to_string(eps) + " exceeds the supported bound 0.5");
  }
}

}  // namespace

std::string_view preset_name(Preset p) {
  switch (p) {
    case Preset::fig1_eps_sweep: return "fig1_eps_sweep";
    case Preset::fig2_dim_misspec: return "fig2_dim_misspec";
    case Preset::fig2_noise_sweep: return "fig2_noise_sweep";
    case Preset::fig2_runtime: return "fig2_runtime";
    case Preset::fig4_heatmap: return "fig4_heatmap";
    case Preset::custom: return "custom";
  }
  return "custom";
}

Preset parse_preset(std::string_view name) {
  for (Preset p : {Preset::fig1_eps_sweep, Preset::fig2_dim_misspec, Preset::fig2_noise_sweep, Preset::fig2_runtime,
                   Preset::fig4_heatmap, Preset::custom}) {
    if (preset_name(p) == name) return p;
  }
  fail(ErrorCode::config_error, "unknown preset '" + std::string(name) + "'");
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::ransac_plus: return "ransac_plus";
    case Method::classic_ransac: return "classic_ransac";
    case Method::oracle_pca: return "oracle_pca";
  }
  return "ransac_plus";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::ransac_plus, Method::classic_ransac, Method::oracle_pca}) {
    if (method_name(m) == name) return m;
  }
  fail(ErrorCode::config_error, "unknown method '" + std::string(name) + "'");
}

Index ExperimentSpec::cell_count() const {
  return static_cast<Index>(r_stars.size() * epsilons.size() * sigma2s.size());
}

void ExperimentSpec::validate() const {
  if (d < 2) fail(ErrorCode::config_error, "d must be at least 2");
  if (n < 4) fail(ErrorCode::config_error, "n must be at least 4");
  if (trials < 1) fail(ErrorCode::config_error, "trials must be at least 1");
  if (threads < 1) fail(ErrorCode::config_error, "threads must be at least 1");
  if (r_stars.empty() || epsilons.empty() || sigma2s.empty()) fail(ErrorCode::config_error, "grid lists must be non-empty");
  if (methods.empty()) fail(ErrorCode::config_error, "at least one method is required");
  if (!(clean_eigenvalue > 0.0)) fail(ErrorCode::config_error, "eigenvalue must be positive");
  for (double eps : epsilons) check_epsilon(eps, "epsilon");
  if (assumed_epsilon) check_epsilon(*assumed_epsilon, "stage2 epsilon");
  for (double s2 : sigma2s) {
    if (!(s2 >= 0.0)) fail(ErrorCode::config_error, "sigma2 values must be non-negative");
  }
  for (Index r : r_stars) {
    if (r < 1 || r >= d) fail(ErrorCode::config_error, "r_star values must lie in [1, d)");
    if (adversary.kind == AdversaryKind::orthogonal_lowrank && (adversary.rank < 1 || adversary.rank > d - r)) {
      fail(ErrorCode::config_error, "adversary_rank must lie in [1, d - r_star]");
    }
    const Index search = r + baseline.r_offset;
    for (Method m : methods) {
      if (m == Method::classic_ransac && (search < 1 || search >= d)) {
        fail(ErrorCode::config_error, "classic RANSAC dimension r_star + r_offset must lie in [1, d)");
      }
    }
  }
  if (!(baseline.consensus_fraction > 0.0 && baseline.consensus_fraction <= 1.0)) {
    fail(ErrorCode::config_error, "consensus_fraction must lie in (0, 1]");
  }
  if (baseline.max_iters < 1) fail(ErrorCode::config_error, "max_iters must be at least 1");
  if (baseline.dist_threshold && !(*baseline.dist_threshold >= 0.0)) {
    fail(ErrorCode::config_error, "dist_threshold must be non-negative");
  }
  try {
    ransac_plus.stage1.validate();
    Stage2Config s2 = ransac_plus.stage2;
    s2.epsilon = 0.0;
    s2.validate();
  } catch (const Error& e) {
    fail(ErrorCode::config_error, e.detail());
  }
}

ExperimentSpec preset_spec(Preset preset) {
  ExperimentSpec s;
  s.preset = preset;
  switch (preset) {
    case Preset::fig1_eps_sweep:
      s.epsilons = {0.0, 0.1, 0.2, 0.3, 0.4};
      s.methods = {Method::ransac_plus, Method::classic_ransac};
      break;
    case Preset::fig2_dim_misspec:
      s.epsilons = {0.0, 0.1, 0.2, 0.3};
      s.methods = {Method::ransac_plus, Method::classic_ransac};
      s.baseline.r_offset = 1;
      break;
    case Preset::fig2_noise_sweep:
      s.epsilons = {0.2};
      s.sigma2s = {0.0, 1e-4, 4e-4, 1.6e-3, 6.4e-3};
      s.methods = {Method::ransac_plus, Method::classic_ransac};
      break;
    case Preset::fig2_runtime:
      s.d = 1000;
      s.epsilons = {0.2};
      s.r_stars = {5, 10, 20, 40};
      s.trials = 3;
      s.methods = {Method::ransac_plus, Method::classic_ransac};
      s.ransac_plus.stage2.T_cap = 2000;
      break;
    case Preset::fig4_heatmap:
      s.epsilons = {0.0, 0.075, 0.15, 0.225, 0.3};
      s.sigma2s = {0.0, 0.0125, 0.025, 0.0375, 0.05};
      s.ransac_plus.stage2.T_cap = 2000;
      break;
    case Preset::custom:
      break;
  }
  return s;
}

ExperimentSpec parse_config_text(std::string_view text) {
  struct Entry {
    std::string value;
    Index line;
  };
  std::map<std::string, std::map<std::string, Entry>> entries;
  const auto& table = key_table();

  std::string section;
  Index line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_at(line_no, "malformed section header '" + std::string(line) + "'");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!table.contains(section)) fail_at(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail_at(line_no, "expected key = value, got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (section.empty()) fail_at(line_no, "key '" + key + "' appears before any section");
    if (key.empty()) fail_at(line_no, "missing key before '='");
    if (!table.at(section).contains(key)) fail_at(line_no, "unknown key '" + key + "' in [" + section + "]");
    auto& slot = entries[section];
    if (const auto it = slot.find(key); it != slot.end()) {
      fail_at(line_no, "duplicate key '" + key + "' in [" + section + "] (first set on line " +
                           std::to_string(it->second.line) + ")");
    }
    slot.emplace(key, Entry{value, line_no});
  }

  Preset preset = Preset::custom;
  if (const auto it = entries["experiment"].find("preset"); it != entries["experiment"].end()) {
    try {
      preset = parse_preset(it->second.value);
    } catch (const Error& e) {
      fail_at(it->second.line, e.detail());
    }
  }
  ExperimentSpec spec = preset_spec(preset);
  for (const auto& [sec, keys] : entries) {
    for (const auto& [key, entry] : keys) {
      try {
        table.at(sec).at(key).set(spec, entry.value);
        if (sec == "stage2" && key == "epsilon") check_epsilon(*spec.assumed_epsilon, "stage2 epsilon");
        if (sec == "experiment" && key == "epsilon") {
          for (double eps : spec.epsilons) check_epsilon(eps, "epsilon");
        }
      } catch (const Error& e) {
        fail_at(entry.line, e.detail(), e.code() == ErrorCode::epsilon_too_large ? e.code() : ErrorCode::config_error);
      }
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

std::string config_reference() {
  std::string out;
  for (const char* sec : {"experiment", "stage1", "stage2", "baseline"}) {
    out += "[" + std::string(sec) + "]\n";
    for (const auto& [key, info] : key_table().at(sec)) {
      out += "  " + key + " = " + std::string(info.help) + "\n";
    }
  }
  return out;
}

}  // namespace rsr::harness
