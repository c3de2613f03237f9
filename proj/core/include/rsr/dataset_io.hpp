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

#include "rsr/datagen.hpp"

namespace rsr {

// Binary container layout (all fields little-endian):
//
//   bytes 0..4   magic "RSRK1"
//   u64          d
//   u64          n
//   u64          r*
//   f64          epsilon
//   f64[d * n]   X, column-major
//   u8[n]        inlier mask (1 = inlier)
//
// Model metadata (U*, clean spectrum, noise moments, seed, adversary) goes to a
// JSON sidecar at `<path>.json`.

inline constexpr char kDatasetMagic[5] = {'R', 'S', 'R', 'K', '1'};

std::filesystem::path sidecar_path(const std::filesystem::path& container);

void write_dataset(const CorruptedDataset& dataset, const std::filesystem::path& path,
                   const std::optional<AdversaryStrategy>& adversary = std::nullopt);

/// Reads a container and its sidecar. Throws io_error on missing files and
/// schema_error on malformed content.
CorruptedDataset read_dataset(const std::filesystem::path& path);

}  // namespace rsr
