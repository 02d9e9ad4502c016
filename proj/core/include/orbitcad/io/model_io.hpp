// Copyright 2026 The OrbitCAD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "orbitcad/scene/model.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orbitcad::io {

/// `kGltf` reads both .glb and .gltf (JSON) input and writes .glb.
enum class Format { kObj, kStl, kPly, kGltf };

std::string_view format_name(Format f);
/// Accepts "obj", "stl", "ply", "gltf", "glb" (case-insensitive).
Format parse_format(std::string_view name);
/// Guesses from a file extension; throws InvalidArgument when unknown.
Format format_from_path(const std::filesystem::path& path);

struct ImportReport {
  std::size_t node_count = 0;
  std::size_t mesh_count = 0;
  std::uint64_t triangle_count = 0;
  std::vector<std::string> warnings;
};

struct ImportOptions {
  /// Meters per file unit; OBJ/STL/PLY default to meters. Ignored for glTF.
  std::optional<double> unit_scale;
  std::string model_id;
  /// Resolves external .gltf buffer URIs; unset means only data: URIs work.
  std::function<std::vector<std::byte>(std::string_view uri)> resolve_uri;
};

struct ImportResult {
  SceneModel model;
  ImportReport report;
};

ImportResult import_model(std::span<const std::byte> bytes, Format format,
                          const ImportOptions& options = {});
ImportResult import_file(const std::filesystem::path& path, std::optional<Format> format = {},
                         ImportOptions options = {});

struct ExportResult {
  std::vector<std::byte> bytes;
  std::vector<std::string> warnings;
};

/// Exports each node's selected LOD level. OBJ/STL/PLY bake world transforms
/// (STL and PLY also flatten the hierarchy into one mesh); glTF keeps the tree.
ExportResult export_model(const SceneModel& model, Format format);

/// Builds levels 1..n by quadric edge collapse. `ratios` must be strictly
/// decreasing within (0, 1]; a leading 1.0 maps to level 0 itself.
Mesh generate_lods(const Mesh& mesh, std::span<const double> ratios);

/// Generates LODs for every mesh in the model (shared meshes are decimated once).
SceneModel with_lods(const SceneModel& model, std::span<const double> ratios);

std::vector<std::byte> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes);

}  // namespace orbitcad::io
