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

#include "rsr/dataset_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rsr/error.hpp"

namespace rsr {
namespace {

using json = nlohmann::json;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffU);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in, const std::string& what) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    fail(ErrorCode::schema_error, "truncated container while reading " + what);
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[static_cast<std::size_t>(i)];
  return v;
}

double get_f64(std::istream& in, const std::string& what) { return std::bit_cast<double>(get_u64(in, what)); }

std::string_view noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::zero: return "zero";
    case NoiseKind::isotropic: return "isotropic";
    case NoiseKind::diagonal: return "diagonal";
  }
  return "zero";
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "zero") return NoiseKind::zero;
  if (name == "isotropic") return NoiseKind::isotropic;
  if (name == "diagonal") return NoiseKind::diagonal;
  fail(ErrorCode::schema_error, "unknown noise kind '" + name + "'");
}

json adversary_json(const AdversaryStrategy& s) {
  json j{{"kind", std::string(adversary_name(s.kind))}};
  switch (s.kind) {
    case AdversaryKind::orthogonal_lowrank: j["rank"] = s.rank; j["scale"] = s.scale; break;
    case AdversaryKind::inlier_mimic: j["scale"] = s.scale; break;
    case AdversaryKind::point_mass: j["direction"] = s.direction; j["magnitude"] = s.magnitude; break;
    case AdversaryKind::none: break;
  }
  return j;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& container) {
  auto p = container;
  p += ".json";
  return p;
}

void write_dataset(const CorruptedDataset& dataset, const std::filesystem::path& path,
                   const std::optional<AdversaryStrategy>& adversary) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot open '" + path.string() + "' for writing");

  out.write(kDatasetMagic, sizeof(kDatasetMagic));
  put_u64(out, static_cast<std::uint64_t>(dataset.d()));
  put_u64(out, static_cast<std::uint64_t>(dataset.n()));
  put_u64(out, static_cast<std::uint64_t>(dataset.clean_model.r_star()));
  put_f64(out, dataset.epsilon);
  const double* data = dataset.X.data();
  for (Index i = 0; i < dataset.X.size(); ++i) put_f64(out, data[i]);
  for (bool inlier : dataset.inlier_mask) out.put(inlier ? char{1} : char{0});
  if (!out) fail(ErrorCode::io_error, "write to '" + path.string() + "' failed");

  const CleanModel& clean = dataset.clean_model;
  json u_star = json::array();
  for (Index c = 0; c < clean.r_star(); ++c) {
    const Vector col = clean.u_star.columns().col(c);
    u_star.push_back(std::vector<double>(col.data(), col.data() + col.size()));
  }
  const NoiseModel& noise = dataset.noise_model;
  json meta{
      {"format", "RSRK1"},
      {"d", dataset.d()},
      {"n", dataset.n()},
      {"r_star", clean.r_star()},
      {"epsilon", dataset.epsilon},
      {"outliers", dataset.outlier_count()},
      {"seed", dataset.seed},
      {"clean_model",
       {{"distribution", "gaussian"}, {"eigenvalues", clean.eigenvalues}, {"u_star_columns", u_star}}},
      {"noise_model",
       {{"kind", std::string(noise_kind_name(noise.kind))},
        {"sigma2", noise.sigma2},
        {"trace", noise.trace},
        {"spectral_norm", noise.spectral_norm},
        {"diagonal", noise.diagonal}}},
  };
  if (adversary) meta["adversary"] = adversary_json(*adversary);

  std::ofstream side(sidecar_path(path), std::ios::trunc);
  if (!side) fail(ErrorCode::io_error, "cannot open '" + sidecar_path(path).string() + "' for writing");
  side << meta.dump(2) << '\n';
  if (!side) fail(ErrorCode::io_error, "write to sidecar failed");
}

CorruptedDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open '" + path.string() + "'");

  char magic[sizeof(kDatasetMagic)] = {};
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0) {
    fail(ErrorCode::schema_error, "'" + path.string() + "' is not an RSRK1 container");
  }
  const auto d = static_cast<Index>(get_u64(in, "d"));
  const auto n = static_cast<Index>(get_u64(in, "n"));
  const auto r_star = static_cast<Index>(get_u64(in, "r*"));
  const double epsilon = get_f64(in, "epsilon");
  if (d < 1 || n < 1 || r_star < 1 || r_star > d || d > (Index{1} << 24) || n > (Index{1} << 28)) {
    fail(ErrorCode::schema_error, "implausible container header");
  }
  Matrix X(d, n);
  double* data = X.data();
  for (Index i = 0; i < X.size(); ++i) data[i] = get_f64(in, "matrix data");
  std::vector<bool> mask(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const int byte = in.get();
    if (byte != 0 && byte != 1) fail(ErrorCode::schema_error, "bad or truncated inlier mask");
    mask[static_cast<std::size_t>(i)] = byte == 1;
  }

  std::ifstream side(sidecar_path(path));
  if (!side) fail(ErrorCode::io_error, "missing sidecar '" + sidecar_path(path).string() + "'");
  json meta;
  try {
    side >> meta;
    if (meta.at("d").get<Index>() != d || meta.at("n").get<Index>() != n ||
        meta.at("r_star").get<Index>() != r_star) {
      fail(ErrorCode::schema_error, "sidecar does not match container header");
    }
    const auto& cm = meta.at("clean_model");
    const auto cols = cm.at("u_star_columns").get<std::vector<std::vector<double>>>();
    if (static_cast<Index>(cols.size()) != r_star) fail(ErrorCode::schema_error, "U* column count mismatch");
    Matrix u(d, r_star);
    for (Index c = 0; c < r_star; ++c) {
      if (static_cast<Index>(cols[static_cast<std::size_t>(c)].size()) != d) {
        fail(ErrorCode::schema_error, "U* column length mismatch");
      }
      u.col(c) = Eigen::Map<const Vector>(cols[static_cast<std::size_t>(c)].data(), d);
    }
    CleanModel clean{SubspaceBasis(std::move(u)), cm.at("eigenvalues").get<std::vector<double>>(),
                     DistributionKind::gaussian};
    clean.validate();

    const auto& nm = meta.at("noise_model");
    NoiseModel noise;
    noise.kind = parse_noise_kind(nm.at("kind").get<std::string>());
    noise.sigma2 = nm.at("sigma2").get<double>();
    noise.trace = nm.at("trace").get<double>();
    noise.spectral_norm = nm.at("spectral_norm").get<double>();
    noise.diagonal = nm.value("diagonal", std::vector<double>{});
    noise.validate();

    return CorruptedDataset{std::move(X), epsilon, std::move(mask), std::move(clean), std::move(noise),
                            meta.at("seed").get<Seed>()};
  } catch (const json::exception& e) {
    fail(ErrorCode::schema_error, std::string("malformed sidecar: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::invalid_argument) fail(ErrorCode::schema_error, e.detail());
    throw;
  }
}

}  // namespace rsr
