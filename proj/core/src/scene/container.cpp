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

#include "orbitcad/scene/container.hpp"

#include "../common/bytes.hpp"

#include <map>
#include <string>

namespace orbitcad {

namespace {

using detail::ByteReader;
using detail::ByteWriter;

constexpr std::uint32_t kNone = 0xFFFFFFFFu;
constexpr char kMagic[4] = {'O', 'C', 'M', 'F'};

class StringTable {
 public:
  std::uint32_t intern(const std::string& s) {
    auto [it, inserted] = index_.try_emplace(s, static_cast<std::uint32_t>(strings_.size()));
    if (inserted) strings_.push_back(s);
    return it->second;
  }
  const std::vector<std::string>& strings() const { return strings_; }

 private:
  std::map<std::string, std::uint32_t> index_;
  std::vector<std::string> strings_;
};

void put_tag(ByteWriter& w, const char (&tag)[5]) {
  for (int i = 0; i < 4; ++i) w.put<char>(tag[i]);
}

template <typename Fn>
void chunk(ByteWriter& w, const char (&tag)[5], Fn&& body) {
  put_tag(w, tag);
  std::size_t len_pos = w.size();
  w.put<std::uint64_t>(0);
  std::size_t start = w.size();
  body();
  w.patch_u64(len_pos, w.size() - start);
}

void put_vec3(ByteWriter& w, const Vec3& v) {
  w.put(v.x());
  w.put(v.y());
  w.put(v.z());
}

Vec3 get_vec3(ByteReader& r) {
  double x = r.get<double>();
  double y = r.get<double>();
  double z = r.get<double>();
  return {x, y, z};
}

}  // namespace

std::vector<std::byte> serialize(const SceneModel& model) {
  StringTable strings;
  strings.intern(model.model_id());
  for (const auto& [id, n] : model.nodes()) {
    strings.intern(n.name);
    strings.intern(n.node_type);
  }

  ByteWriter w;
  for (char c : kMagic) w.put<char>(c);
  w.put<std::uint32_t>(kContainerVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(3 + model.meshes().size()));

  chunk(w, "STRS", [&] {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(strings.strings().size()));
    for (const auto& s : strings.strings()) w.put_string(s);
  });
  chunk(w, "META", [&] {
    w.put<std::uint32_t>(strings.intern(model.model_id()));
    w.put<double>(model.unit_scale());
    w.put<std::uint32_t>(model.root() ? to_underlying(*model.root()) : kNone);
  });
  chunk(w, "NODE", [&] {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(model.nodes().size()));
    for (const auto& [id, n] : model.nodes()) {
      w.put<std::uint32_t>(to_underlying(id));
      w.put<std::uint32_t>(strings.intern(n.name));
      w.put<std::uint32_t>(strings.intern(n.node_type));
      w.put<std::uint32_t>(n.parent ? to_underlying(*n.parent) : kNone);
      w.put<std::uint32_t>(static_cast<std::uint32_t>(n.children.size()));
      for (NodeId c : n.children) w.put<std::uint32_t>(to_underlying(c));
      put_vec3(w, n.local_transform.translation);
      const auto& q = n.local_transform.rotation;
      w.put(q.x());
      w.put(q.y());
      w.put(q.z());
      w.put(q.w());
      put_vec3(w, n.local_transform.scale);
      w.put<std::uint32_t>(n.mesh ? to_underlying(*n.mesh) : kNone);
      w.put<std::uint8_t>(n.style.color ? 1 : 0);
      put_vec3(w, n.style.color.value_or(Vec3::Zero()));
      w.put<double>(n.style.opacity);
      w.put<std::uint8_t>(n.style.occlusion_only ? 1 : 0);
      w.put<std::uint32_t>(n.lod_level);
    }
  });
  for (const auto& [id, mesh] : model.meshes()) {
    chunk(w, "MESH", [&] {
      w.put<std::uint32_t>(to_underlying(id));
      w.put<std::uint32_t>(static_cast<std::uint32_t>(mesh->positions().size()));
      for (const Vec3& p : mesh->positions()) put_vec3(w, p);
      w.put<std::uint32_t>(static_cast<std::uint32_t>(mesh->lod_count()));
      for (const LodLevel& lod : mesh->lods()) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(lod.triangles.size()));
        for (const Triangle& t : lod.triangles) {
          for (std::uint32_t v : t) w.put<std::uint32_t>(v);
        }
      }
    });
  }
  return w.take();
}

SceneModel deserialize(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  for (char c : kMagic) {
    if (r.get<char>() != c) r.fail("bad magic, not an OCMF container");
  }
  auto version = r.get<std::uint32_t>();
  if (version != kContainerVersion) r.fail("unsupported container version " + std::to_string(version));
  auto chunk_count = r.get<std::uint32_t>();

  std::vector<std::string> strings;
  auto str = [&](ByteReader& rr, std::uint32_t idx) -> const std::string& {
    if (idx >= strings.size()) rr.fail("string index out of range");
    return strings[idx];
  };

  SceneModel model;
  std::optional<NodeId> root;
  std::vector<SceneNode> nodes;
  for (std::uint32_t ci = 0; ci < chunk_count; ++ci) {
    std::string tag(4, '\0');
    for (auto& c : tag) c = r.get<char>();
    auto len = r.get<std::uint64_t>();
    std::size_t base = r.offset();
    if (len > r.remaining()) r.fail("chunk " + tag + " overruns the file");
    ByteReader body(r.get_bytes(len), base);
    if (tag == "STRS") {
      auto n = body.get<std::uint32_t>();
      for (std::uint32_t i = 0; i < n; ++i) strings.push_back(body.get_string());
    } else if (tag == "META") {
      model.set_model_id(str(body, body.get<std::uint32_t>()));
      double scale = body.get<double>();
      if (!(scale > 0)) body.fail("unit_scale must be positive");
      model.set_unit_scale(scale);
      auto rid = body.get<std::uint32_t>();
      if (rid != kNone) root = NodeId{rid};
    } else if (tag == "NODE") {
      auto n = body.get<std::uint32_t>();
      for (std::uint32_t i = 0; i < n; ++i) {
        SceneNode node;
        node.id = NodeId{body.get<std::uint32_t>()};
        node.name = str(body, body.get<std::uint32_t>());
        node.node_type = str(body, body.get<std::uint32_t>());
        auto parent = body.get<std::uint32_t>();
        if (parent != kNone) node.parent = NodeId{parent};
        auto nc = body.get<std::uint32_t>();
        if (nc > body.remaining() / 4) body.fail("child count overruns chunk");
        for (std::uint32_t c = 0; c < nc; ++c) node.children.push_back(NodeId{body.get<std::uint32_t>()});
        node.local_transform.translation = get_vec3(body);
        double qx = body.get<double>(), qy = body.get<double>(), qz = body.get<double>(),
               qw = body.get<double>();
        node.local_transform.rotation = Quat(qw, qx, qy, qz);
        node.local_transform.scale = get_vec3(body);
        auto mesh = body.get<std::uint32_t>();
        if (mesh != kNone) node.mesh = MeshId{mesh};
        bool has_color = body.get<std::uint8_t>() != 0;
        Vec3 color = get_vec3(body);
        if (has_color) node.style.color = color;
        node.style.opacity = body.get<double>();
        node.style.occlusion_only = body.get<std::uint8_t>() != 0;
        node.lod_level = body.get<std::uint32_t>();
        nodes.push_back(std::move(node));
      }
    } else if (tag == "MESH") {
      auto id = body.get<std::uint32_t>();
      auto nv = body.get<std::uint32_t>();
      if (nv > body.remaining() / 24) body.fail("vertex count overruns chunk");
      std::vector<Vec3> positions(nv);
      for (auto& p : positions) p = get_vec3(body);
      auto nl = body.get<std::uint32_t>();
      if (nl == 0) body.fail("mesh has no LOD levels");
      std::vector<LodLevel> lods(nl);
      for (auto& lod : lods) {
        auto nt = body.get<std::uint32_t>();
        if (nt > body.remaining() / 12) body.fail("triangle count overruns chunk");
        lod.triangles.resize(nt);
        for (auto& t : lod.triangles) {
          for (auto& v : t) {
            v = body.get<std::uint32_t>();
            if (v >= nv) body.fail("triangle index out of range");
          }
        }
      }
      Mesh mesh(std::move(positions), std::move(lods[0].triangles));
      lods.erase(lods.begin());
      try {
        mesh.set_lower_lods(std::move(lods));
      } catch (const Error& e) {
        body.fail(e.what());
      }
      model.insert_mesh(MeshId{id}, std::make_shared<const Mesh>(std::move(mesh)));
    }
    // Unknown chunks are skipped for forward compatibility.
  }
  if (!r.at_end()) r.fail("trailing bytes after last chunk");

  // Insert parents before children so links can be checked as they are made.
  std::map<NodeId, SceneNode> by_id;
  for (auto& n : nodes) {
    NodeId id = n.id;
    if (!by_id.emplace(id, std::move(n)).second) r.fail("duplicate node id");
  }
  if (!by_id.empty()) {
    if (!root || !by_id.count(*root)) r.fail("root node missing");
    std::vector<NodeId> stack{*root};
    std::size_t inserted = 0;
    while (!stack.empty()) {
      NodeId cur = stack.back();
      stack.pop_back();
      auto it = by_id.find(cur);
      if (it == by_id.end()) r.fail("dangling child reference");
      SceneNode node = it->second;
      auto children = node.children;
      node.children.clear();
      try {
        model.insert_node(std::move(node));
      } catch (const Error& e) {
        r.fail(e.what());
      }
      ++inserted;
      for (auto c = children.rbegin(); c != children.rend(); ++c) stack.push_back(*c);
    }
    if (inserted != by_id.size()) r.fail("node table is not a single rooted tree");
    for (const auto& [id, n] : by_id) {
      if (model.node(id).children != n.children) r.fail("parent/child links inconsistent");
    }
  }
  return model;
}

}  // namespace orbitcad
