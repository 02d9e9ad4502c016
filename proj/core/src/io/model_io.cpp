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

#include "orbitcad/io/model_io.hpp"

#include "formats.hpp"
#include "orbitcad/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>

namespace orbitcad::io {

std::string_view format_name(Format f) {
  switch (f) {
    case Format::kObj: return "obj";
    case Format::kStl: return "stl";
    case Format::kPly: return "ply";
    case Format::kGltf: return "gltf";
  }
  return "?";
}

Format parse_format(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (!lower.empty() && lower.front() == '.') lower.erase(0, 1);
  if (lower == "obj") return Format::kObj;
  if (lower == "stl") return Format::kStl;
  if (lower == "ply") return Format::kPly;
  if (lower == "gltf" || lower == "glb") return Format::kGltf;
  throw InvalidArgument("unsupported model format '" + std::string(name) + "'");
}

Format format_from_path(const std::filesystem::path& path) {
  return parse_format(path.extension().string());
}

ImportResult import_model(std::span<const std::byte> bytes, Format format,
                          const ImportOptions& options) {
  ImportResult result;
  switch (format) {
    case Format::kObj: result = detail::import_obj(bytes, options); break;
    case Format::kStl: result = detail::import_stl(bytes, options); break;
    case Format::kPly: result = detail::import_ply(bytes, options); break;
    case Format::kGltf: result = detail::import_gltf(bytes, options); break;
  }
  if (format != Format::kGltf && options.unit_scale) {
    result.model.set_unit_scale(*options.unit_scale);
  }
  result.model.set_model_id(options.model_id);
  result.model.validate();
  detail::fill_counts(result.model, result.report);
  if (result.report.triangle_count == 0) result.report.warnings.push_back("model has no triangles");
  return result;
}

ImportResult import_file(const std::filesystem::path& path, std::optional<Format> format,
                         ImportOptions options) {
  Format f = format ? *format : format_from_path(path);
  if (!options.resolve_uri) {
    auto dir = path.parent_path();
    options.resolve_uri = [dir](std::string_view uri) {
      return read_file(dir / std::filesystem::path(std::string(uri)));
    };
  }
  return import_model(read_file(path), f, options);
}

ExportResult export_model(const SceneModel& model, Format format) {
  switch (format) {
    case Format::kObj: return detail::export_obj(model);
    case Format::kStl: return detail::export_stl(model);
    case Format::kPly: return detail::export_ply(model);
    case Format::kGltf: return detail::export_gltf(model);
  }
  throw InvalidArgument("unsupported export format");
}

SceneModel with_lods(const SceneModel& model, std::span<const double> ratios) {
  SceneModel out = model;
  for (const auto& [id, mesh] : model.meshes()) {
    out.replace_mesh(id, std::make_shared<const Mesh>(generate_lods(*mesh, ratios)));
  }
  return out;
}

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> data(size);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(size));
  if (!in) throw Error("io_error", "failed reading " + path.string());
  return data;
}

void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("io_error", "failed writing " + path.string());
}

namespace detail {

BakedMesh bake_node(const SceneModel& model, const FlatEntry& entry) {
  const SceneNode& node = model.node(entry.node);
  const Mesh& mesh = model.mesh(entry.mesh);
  Mat4 world = entry.world;
  world.block<3, 4>(0, 0) /= model.unit_scale();
  const LodLevel& lod = mesh.lod(node.lod_level);

  // Only vertices referenced by the exported level are written.
  std::vector<std::uint32_t> remap(mesh.positions().size(), UINT32_MAX);
  BakedMesh out;
  out.triangles.reserve(lod.triangles.size());
  for (const Triangle& t : lod.triangles) {
    Triangle nt;
    for (int k = 0; k < 3; ++k) {
      auto& r = remap[t[k]];
      if (r == UINT32_MAX) {
        r = static_cast<std::uint32_t>(out.positions.size());
        out.positions.push_back(transform_point(world, mesh.positions()[t[k]]));
      }
      nt[k] = r;
    }
    out.triangles.push_back(nt);
  }
  return out;
}

void fill_counts(const SceneModel& model, ImportReport& report) {
  report.node_count = model.nodes().size();
  report.mesh_count = model.meshes().size();
  report.triangle_count = total_triangles(model);
}

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace detail
}  // namespace orbitcad::io
