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

#include "formats.hpp"

#include "orbitcad/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <string>

namespace orbitcad::io::detail {

namespace {

using nlohmann::json;

constexpr std::uint32_t kGlbMagic = 0x46546C67;  // "glTF"
constexpr std::uint32_t kChunkJson = 0x4E4F534A;
constexpr std::uint32_t kChunkBin = 0x004E4942;
constexpr int kFloat = 5126;
constexpr int kUByte = 5121;
constexpr int kUShort = 5123;
constexpr int kUInt = 5125;
constexpr const char* kExtrasKey = "orbitcad";

[[noreturn]] void fail(const std::string& what) { throw ParseError("glTF: " + what, 0, 0); }

std::vector<std::byte> decode_base64(std::string_view in) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+' || c == '-') return 62;
    if (c == '/' || c == '_') return 63;
    return -1;
  };
  std::vector<std::byte> out;
  out.reserve(in.size() * 3 / 4);
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : in) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    int v = value(c);
    if (v < 0) fail("invalid base64 data URI");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::byte>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

struct Document {
  json root;
  std::vector<std::vector<std::byte>> buffers;
};

Document load(std::span<const std::byte> bytes, const ImportOptions& options) {
  Document doc;
  std::span<const std::byte> bin;
  bool has_bin = false;
  std::uint32_t magic = 0;
  if (bytes.size() >= 4) std::memcpy(&magic, bytes.data(), 4);
  if (magic == kGlbMagic) {
    ByteReader r(bytes);
    r.get<std::uint32_t>();
    auto version = r.get<std::uint32_t>();
    if (version != 2) r.fail("unsupported GLB version " + std::to_string(version));
    auto length = r.get<std::uint32_t>();
    if (length > bytes.size()) r.fail("GLB length field exceeds file size");
    auto json_len = r.get<std::uint32_t>();
    if (r.get<std::uint32_t>() != kChunkJson) r.fail("first GLB chunk is not JSON");
    std::size_t json_at = r.offset();
    auto json_bytes = r.get_bytes(json_len);
    try {
      doc.root = json::parse(as_chars(json_bytes));
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("glTF JSON: ") + e.what(), 0, json_at + e.byte);
    }
    while (r.offset() + 8 <= length) {
      auto len = r.get<std::uint32_t>();
      auto type = r.get<std::uint32_t>();
      auto data = r.get_bytes(len);
      if (type == kChunkBin && !has_bin) {
        bin = data;
        has_bin = true;
      }
    }
  } else {
    try {
      doc.root = json::parse(as_chars(bytes));
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("glTF JSON: ") + e.what(), 0, e.byte);
    }
  }

  const json& buffers = doc.root.value("buffers", json::array());
  for (std::size_t i = 0; i < buffers.size(); ++i) {
    const json& b = buffers[i];
    std::vector<std::byte> data;
    if (!b.contains("uri")) {
      if (i != 0 || !has_bin) fail("buffer " + std::to_string(i) + " has no uri and no GLB BIN chunk");
      data.assign(bin.begin(), bin.end());
    } else {
      std::string uri = b["uri"].get<std::string>();
      if (uri.rfind("data:", 0) == 0) {
        auto comma = uri.find(',');
        if (comma == std::string::npos || uri.find(";base64") > comma) fail("unsupported data URI");
        data = decode_base64(std::string_view(uri).substr(comma + 1));
      } else if (options.resolve_uri) {
        data = options.resolve_uri(uri);
      } else {
        fail("external buffer '" + uri + "' cannot be resolved");
      }
    }
    auto need = b.value("byteLength", std::size_t{0});
    if (data.size() < need) fail("buffer " + std::to_string(i) + " shorter than byteLength");
    doc.buffers.push_back(std::move(data));
  }
  return doc;
}

/// Reads accessor `index` as doubles, `components` per element.
std::vector<double> read_accessor(const Document& doc, std::size_t index, int components) {
  const json& accessors = doc.root.at("accessors");
  if (index >= accessors.size()) fail("accessor index out of range");
  const json& acc = accessors[index];
  if (acc.contains("sparse")) fail("sparse accessors are not supported");
  int ctype = acc.at("componentType").get<int>();
  std::size_t count = acc.at("count").get<std::size_t>();
  std::string type = acc.at("type").get<std::string>();
  int expect = components == 3 ? 3 : 1;
  if ((expect == 3 && type != "VEC3") || (expect == 1 && type != "SCALAR")) {
    fail("accessor " + std::to_string(index) + " has unexpected type " + type);
  }
  std::size_t csize = ctype == kFloat || ctype == kUInt ? 4 : ctype == kUShort ? 2 : ctype == kUByte ? 1 : 0;
  if (csize == 0) fail("unsupported componentType " + std::to_string(ctype));
  std::vector<double> out(count * expect, 0.0);
  if (!acc.contains("bufferView")) return out;
  const json& view = doc.root.at("bufferViews").at(acc["bufferView"].get<std::size_t>());
  std::size_t buffer = view.at("buffer").get<std::size_t>();
  if (buffer >= doc.buffers.size()) fail("bufferView references a missing buffer");
  const auto& data = doc.buffers[buffer];
  std::size_t offset = view.value("byteOffset", std::size_t{0}) + acc.value("byteOffset", std::size_t{0});
  std::size_t elem = csize * expect;
  std::size_t stride = view.value("byteStride", elem);
  if (count > 0 && offset + stride * (count - 1) + elem > data.size()) {
    fail("accessor " + std::to_string(index) + " overruns its buffer");
  }
  for (std::size_t i = 0; i < count; ++i) {
    const std::byte* p = data.data() + offset + i * stride;
    for (int k = 0; k < expect; ++k) {
      const std::byte* q = p + k * csize;
      double v = 0;
      switch (ctype) {
        case kFloat: { float f; std::memcpy(&f, q, 4); v = f; break; }
        case kUInt: { std::uint32_t u; std::memcpy(&u, q, 4); v = u; break; }
        case kUShort: { std::uint16_t u; std::memcpy(&u, q, 2); v = u; break; }
        case kUByte: { std::uint8_t u; std::memcpy(&u, q, 1); v = u; break; }
      }
      out[i * expect + k] = v;
    }
  }
  return out;
}

Transform node_transform(const json& n) {
  Transform t;
  if (n.contains("matrix")) {
    auto m = n["matrix"].get<std::vector<double>>();
    if (m.size() != 16) fail("node matrix must have 16 entries");
    Mat4 mat;
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 4; ++r) mat(r, c) = m[c * 4 + r];
    Eigen::Matrix3d lin = mat.block<3, 3>(0, 0);
    Vec3 s(lin.col(0).norm(), lin.col(1).norm(), lin.col(2).norm());
    if (lin.determinant() < 0) s.x() = -s.x();
    Eigen::Matrix3d rot = lin * s.cwiseInverse().asDiagonal();
    t.translation = mat.block<3, 1>(0, 3);
    t.rotation = Quat(rot);
    t.scale = s;
  } else {
    if (n.contains("translation")) {
      auto v = n["translation"].get<std::vector<double>>();
      if (v.size() != 3) fail("translation must have 3 entries");
      t.translation = Vec3(v[0], v[1], v[2]);
    }
    if (n.contains("rotation")) {
      auto v = n["rotation"].get<std::vector<double>>();
      if (v.size() != 4) fail("rotation must have 4 entries");
      t.rotation = Quat(v[3], v[0], v[1], v[2]);
    }
    if (n.contains("scale")) {
      auto v = n["scale"].get<std::vector<double>>();
      if (v.size() != 3) fail("scale must have 3 entries");
      t.scale = Vec3(v[0], v[1], v[2]);
    }
  }
  t.normalize();
  return t;
}

Mesh load_mesh(const Document& doc, std::size_t index, std::vector<std::string>& warnings) {
  const json& meshes = doc.root.at("meshes");
  if (index >= meshes.size()) fail("mesh index out of range");
  std::vector<Vec3> positions;
  std::vector<Triangle> tris;
  for (const json& prim : meshes[index].at("primitives")) {
    int mode = prim.value("mode", 4);
    if (mode != 4) {
      warnings.push_back("mesh " + std::to_string(index) + ": skipped primitive with mode " +
                         std::to_string(mode));
      continue;
    }
    auto pos = read_accessor(doc, prim.at("attributes").at("POSITION").get<std::size_t>(), 3);
    auto base = static_cast<std::uint32_t>(positions.size());
    std::size_t nv = pos.size() / 3;
    for (std::size_t i = 0; i < nv; ++i) positions.emplace_back(pos[3 * i], pos[3 * i + 1], pos[3 * i + 2]);
    std::vector<double> idx;
    if (prim.contains("indices")) {
      idx = read_accessor(doc, prim["indices"].get<std::size_t>(), 1);
    } else {
      for (std::size_t i = 0; i < nv; ++i) idx.push_back(static_cast<double>(i));
    }
    if (idx.size() % 3 != 0) fail("triangle index count is not a multiple of 3");
    for (std::size_t i = 0; i < idx.size(); i += 3) {
      Triangle t;
      for (int k = 0; k < 3; ++k) {
        if (idx[i + k] >= static_cast<double>(nv)) fail("vertex index out of range");
        t[k] = base + static_cast<std::uint32_t>(idx[i + k]);
      }
      tris.push_back(t);
    }
  }
  return Mesh(std::move(positions), std::move(tris));
}

void read_extras(const json& n, SceneNode& node) {
  if (!n.contains("extras") || !n["extras"].is_object() || !n["extras"].contains(kExtrasKey)) return;
  const json& x = n["extras"][kExtrasKey];
  node.node_type = x.value("node_type", std::string{});
  node.style.occlusion_only = x.value("occlusion_only", false);
  node.style.opacity = x.value("opacity", 1.0);
  if (x.contains("color")) {
    auto c = x["color"].get<std::vector<double>>();
    if (c.size() != 3) fail("extras color must have 3 entries");
    node.style.color = Vec3(c[0], c[1], c[2]);
  }
}

}  // namespace

ImportResult import_gltf(std::span<const std::byte> bytes, const ImportOptions& options) {
  ImportResult result;
  Document doc;
  try {
    doc = load(bytes, options);
    const json& nodes = doc.root.value("nodes", json::array());

    std::vector<std::size_t> roots;
    if (doc.root.contains("scenes") && !doc.root["scenes"].empty()) {
      std::size_t scene = doc.root.value("scene", std::size_t{0});
      roots = doc.root["scenes"].at(scene).value("nodes", std::vector<std::size_t>{});
    } else {
      std::set<std::size_t> children;
      for (const json& n : nodes) {
        for (auto c : n.value("children", std::vector<std::size_t>{})) children.insert(c);
      }
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!children.count(i)) roots.push_back(i);
      }
    }

    SceneModel& model = result.model;
    std::map<std::size_t, MeshId> mesh_ids;
    std::set<std::size_t> visited;
    std::optional<NodeId> synthetic_root;
    if (roots.size() != 1) synthetic_root = model.add_node("root", std::nullopt);

    std::vector<std::pair<std::size_t, std::optional<NodeId>>> stack;
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.emplace_back(*it, synthetic_root);
    while (!stack.empty()) {
      auto [gi, parent] = stack.back();
      stack.pop_back();
      if (gi >= nodes.size()) fail("node index out of range");
      if (!visited.insert(gi).second) fail("node " + std::to_string(gi) + " has more than one parent");
      const json& n = nodes[gi];
      std::optional<MeshId> mesh;
      if (n.contains("mesh")) {
        auto mi = n["mesh"].get<std::size_t>();
        auto found = mesh_ids.find(mi);
        if (found == mesh_ids.end()) {
          found = mesh_ids.emplace(mi, model.add_mesh(load_mesh(doc, mi, result.report.warnings))).first;
        }
        mesh = found->second;
      }
      NodeId id = model.add_node(n.value("name", std::string{}), parent, node_transform(n), mesh);
      read_extras(n, model.mutable_node(id));
      auto children = n.value("children", std::vector<std::size_t>{});
      for (auto c = children.rbegin(); c != children.rend(); ++c) stack.emplace_back(*c, id);
    }
    if (model.empty()) model.add_node("root", std::nullopt);
  } catch (const json::exception& e) {
    fail(e.what());
  }
  return result;
}

namespace {

void pad_to_4(std::vector<std::byte>& v, std::byte fill) {
  while (v.size() % 4 != 0) v.push_back(fill);
}

template <typename T>
void append(std::vector<std::byte>& v, const T& x) {
  const auto* p = reinterpret_cast<const std::byte*>(&x);
  v.insert(v.end(), p, p + sizeof x);
}

}  // namespace

ExportResult export_gltf(const SceneModel& model) {
  ExportResult result;
  json doc;
  doc["asset"] = {{"version", "2.0"}, {"generator", "orbitcad"}};
  json nodes = json::array();
  json meshes = json::array();
  json accessors = json::array();
  json views = json::array();
  std::vector<std::byte> bin;
  std::map<std::pair<MeshId, std::size_t>, std::size_t> mesh_index;

  auto add_mesh = [&](MeshId id, std::size_t level) -> std::size_t {
    const Mesh& mesh = model.mesh(id);
    level = std::min(level, mesh.lod_count() - 1);
    auto key = std::make_pair(id, level);
    if (auto it = mesh_index.find(key); it != mesh_index.end()) return it->second;
    const auto& tris = mesh.lod(level).triangles;

    std::size_t pos_offset = bin.size();
    Aabb box;
    for (const Vec3& p : mesh.positions()) {
      Eigen::Vector3f f = p.cast<float>();
      box.extend(f.cast<double>());
      append(bin, f.x());
      append(bin, f.y());
      append(bin, f.z());
    }
    std::size_t pos_len = bin.size() - pos_offset;
    std::size_t idx_offset = bin.size();
    for (const Triangle& t : tris) {
      for (auto v : t) append(bin, v);
    }
    std::size_t idx_len = bin.size() - idx_offset;

    views.push_back({{"buffer", 0}, {"byteOffset", pos_offset}, {"byteLength", pos_len}, {"target", 34962}});
    views.push_back({{"buffer", 0}, {"byteOffset", idx_offset}, {"byteLength", idx_len}, {"target", 34963}});
    json pos_acc = {{"bufferView", views.size() - 2},
                    {"componentType", kFloat},
                    {"count", mesh.positions().size()},
                    {"type", "VEC3"}};
    if (!box.is_empty()) {
      pos_acc["min"] = {box.min.x(), box.min.y(), box.min.z()};
      pos_acc["max"] = {box.max.x(), box.max.y(), box.max.z()};
    } else {
      pos_acc["min"] = {0, 0, 0};
      pos_acc["max"] = {0, 0, 0};
    }
    accessors.push_back(pos_acc);
    accessors.push_back({{"bufferView", views.size() - 1},
                         {"componentType", kUInt},
                         {"count", tris.size() * 3},
                         {"type", "SCALAR"}});
    meshes.push_back({{"primitives",
                       json::array({{{"attributes", {{"POSITION", accessors.size() - 2}}},
                                     {"indices", accessors.size() - 1},
                                     {"mode", 4}}})}});
    mesh_index.emplace(key, meshes.size() - 1);
    return meshes.size() - 1;
  };

  std::map<NodeId, std::size_t> index;
  auto order = model.preorder();
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = i;
  for (NodeId id : order) {
    const SceneNode& n = model.node(id);
    json j = json::object();
    if (!n.name.empty()) j["name"] = n.name;
    Transform t = n.local_transform;
    if (!n.parent && model.unit_scale() != 1.0) {
      t.translation *= model.unit_scale();
      t.scale *= model.unit_scale();
    }
    if (t.translation != Vec3::Zero()) j["translation"] = {t.translation.x(), t.translation.y(), t.translation.z()};
    if (t.rotation.coeffs() != Quat::Identity().coeffs()) {
      j["rotation"] = {t.rotation.x(), t.rotation.y(), t.rotation.z(), t.rotation.w()};
    }
    if (t.scale != Vec3::Ones()) j["scale"] = {t.scale.x(), t.scale.y(), t.scale.z()};
    if (n.mesh) j["mesh"] = add_mesh(*n.mesh, n.lod_level);
    if (!n.children.empty()) {
      json ch = json::array();
      for (NodeId c : n.children) ch.push_back(index.at(c));
      j["children"] = ch;
    }
    json extras = json::object();
    if (!n.node_type.empty()) extras["node_type"] = n.node_type;
    if (n.style.occlusion_only) extras["occlusion_only"] = true;
    if (n.style.opacity != 1.0) extras["opacity"] = n.style.opacity;
    if (n.style.color) extras["color"] = {n.style.color->x(), n.style.color->y(), n.style.color->z()};
    if (!extras.empty()) j["extras"] = {{kExtrasKey, extras}};
    nodes.push_back(std::move(j));
  }

  doc["scene"] = 0;
  doc["scenes"] = json::array({json{{"nodes", order.empty() ? json::array() : json::array({0})}}});
  if (!nodes.empty()) doc["nodes"] = nodes;
  if (!meshes.empty()) {
    doc["meshes"] = meshes;
    doc["accessors"] = accessors;
    doc["bufferViews"] = views;
    doc["buffers"] = json::array({json{{"byteLength", bin.size()}}});
  }

  std::string text = doc.dump();
  std::vector<std::byte> json_chunk(reinterpret_cast<const std::byte*>(text.data()),
                                    reinterpret_cast<const std::byte*>(text.data()) + text.size());
  pad_to_4(json_chunk, std::byte{' '});
  pad_to_4(bin, std::byte{0});

  auto& out = result.bytes;
  std::uint32_t total = 12 + 8 + static_cast<std::uint32_t>(json_chunk.size()) +
                        (bin.empty() ? 0 : 8 + static_cast<std::uint32_t>(bin.size()));
  append(out, kGlbMagic);
  append(out, std::uint32_t{2});
  append(out, total);
  append(out, static_cast<std::uint32_t>(json_chunk.size()));
  append(out, kChunkJson);
  out.insert(out.end(), json_chunk.begin(), json_chunk.end());
  if (!bin.empty()) {
    append(out, static_cast<std::uint32_t>(bin.size()));
    append(out, kChunkBin);
    out.insert(out.end(), bin.begin(), bin.end());
  }
  return result;
}

}  // namespace orbitcad::io::detail
