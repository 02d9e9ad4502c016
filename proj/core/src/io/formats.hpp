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

#include "orbitcad/io/model_io.hpp"

#include "../common/bytes.hpp"

namespace orbitcad::io::detail {

using ::orbitcad::detail::as_bytes;
using ::orbitcad::detail::as_chars;
using ::orbitcad::detail::ByteReader;
using ::orbitcad::detail::ByteWriter;

ImportResult import_obj(std::span<const std::byte> bytes, const ImportOptions& options);
ImportResult import_stl(std::span<const std::byte> bytes, const ImportOptions& options);
ImportResult import_ply(std::span<const std::byte> bytes, const ImportOptions& options);
ImportResult import_gltf(std::span<const std::byte> bytes, const ImportOptions& options);

ExportResult export_obj(const SceneModel& model);
ExportResult export_stl(const SceneModel& model);
ExportResult export_ply(const SceneModel& model);
ExportResult export_gltf(const SceneModel& model);

/// World-space triangles of every mesh node at its selected LOD, in the
/// model's own units (unit_scale not applied).
struct BakedMesh {
  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
};
BakedMesh bake_node(const SceneModel& model, const FlatEntry& entry);

/// Fills the count fields of `report` from the model.
void fill_counts(const SceneModel& model, ImportReport& report);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace orbitcad::io::detail
