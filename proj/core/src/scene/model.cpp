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

#include "orbitcad/scene/model.hpp"

#include "orbitcad/error.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace orbitcad {

namespace {

std::string id_str(NodeId id) { return std::to_string(to_underlying(id)); }

}  // namespace

Mesh::Mesh(std::vector<Vec3> positions, std::vector<Triangle> triangles) : lods_(1) {
  // Unreferenced vertices are dropped so bounds and exports see only real geometry.
  std::vector<std::uint32_t> remap(positions.size(), UINT32_MAX);
  for (const Triangle& t : triangles) {
    for (std::uint32_t v : t) {
      if (v >= positions.size()) {
        throw InvalidArgument("triangle index " + std::to_string(v) + " out of range (" +
                              std::to_string(positions.size()) + " vertices)");
      }
      remap[v] = 0;
    }
  }
  std::uint32_t next = 0;
  for (auto& r : remap) {
    if (r == 0) r = next++;
  }
  if (next == positions.size()) {
    positions_ = std::move(positions);
  } else {
    positions_.reserve(next);
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (remap[i] != UINT32_MAX) positions_.push_back(positions[i]);
    }
    for (Triangle& t : triangles) {
      for (auto& v : t) v = remap[v];
    }
  }
  lods_[0].triangles = std::move(triangles);
}

std::size_t Mesh::triangle_count(std::size_t level) const { return lod(level).triangle_count(); }

const LodLevel& Mesh::lod(std::size_t level) const {
  return lods_[std::min(level, lods_.size() - 1)];
}

void Mesh::set_lower_lods(std::vector<LodLevel> levels) {
  std::size_t prev = lods_.front().triangle_count();
  for (const LodLevel& l : levels) {
    if (l.triangle_count() > prev) throw InvalidArgument("LOD triangle counts must not increase");
    prev = l.triangle_count();
    for (const Triangle& t : l.triangles) {
      for (std::uint32_t v : t) {
        if (v >= positions_.size()) throw InvalidArgument("LOD index out of range");
      }
    }
  }
  lods_.resize(1);
  for (auto& l : levels) lods_.push_back(std::move(l));
}

Aabb Mesh::local_bounds() const {
  Aabb box;
  for (const Vec3& p : positions_) box.extend(p);
  return box;
}

void Mesh::validate() const {
  for (std::size_t i = 0; i < lods_.size(); ++i) {
    if (i > 0 && lods_[i].triangle_count() > lods_[i - 1].triangle_count()) {
      throw InvalidArgument("LOD " + std::to_string(i) + " has more triangles than its predecessor");
    }
    for (const Triangle& t : lods_[i].triangles) {
      for (std::uint32_t v : t) {
        if (v >= positions_.size()) throw InvalidArgument("triangle index out of range");
      }
    }
  }
}

void SceneModel::set_unit_scale(double meters_per_unit) {
  if (!(meters_per_unit > 0.0)) throw InvalidArgument("unit_scale must be positive");
  unit_scale_ = meters_per_unit;
}

const SceneNode& SceneModel::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNodeError("unknown node " + id_str(id));
  return it->second;
}

SceneNode& SceneModel::mutable_node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNodeError("unknown node " + id_str(id));
  return it->second;
}

const Mesh& SceneModel::mesh(MeshId id) const { return *mesh_ptr(id); }

std::shared_ptr<const Mesh> SceneModel::mesh_ptr(MeshId id) const {
  auto it = meshes_.find(id);
  if (it == meshes_.end()) {
    throw InvalidArgument("unknown mesh " + std::to_string(to_underlying(id)));
  }
  return it->second;
}

MeshId SceneModel::add_mesh(Mesh mesh) { return add_mesh(std::make_shared<const Mesh>(std::move(mesh))); }

MeshId SceneModel::add_mesh(std::shared_ptr<const Mesh> mesh) {
  MeshId id{next_mesh_};
  insert_mesh(id, std::move(mesh));
  return id;
}

void SceneModel::insert_mesh(MeshId id, std::shared_ptr<const Mesh> mesh) {
  if (!mesh) throw InvalidArgument("null mesh");
  if (meshes_.count(id)) throw InvalidArgument("duplicate mesh id");
  meshes_.emplace(id, std::move(mesh));
  next_mesh_ = std::max(next_mesh_, to_underlying(id) + 1);
}

void SceneModel::replace_mesh(MeshId id, std::shared_ptr<const Mesh> mesh) {
  auto it = meshes_.find(id);
  if (it == meshes_.end()) throw InvalidArgument("unknown mesh");
  it->second = std::move(mesh);
}

NodeId SceneModel::add_node(std::string name, std::optional<NodeId> parent, Transform local,
                            std::optional<MeshId> mesh) {
  SceneNode n;
  n.id = NodeId{next_node_};
  n.name = std::move(name);
  n.parent = parent;
  n.local_transform = local.normalize();
  n.mesh = mesh;
  NodeId id = n.id;
  insert_node(std::move(n));
  return id;
}

void SceneModel::insert_node(SceneNode n) {
  if (nodes_.count(n.id)) throw InvalidArgument("duplicate node id " + id_str(n.id));
  if (n.mesh && !meshes_.count(*n.mesh)) throw InvalidArgument("node references unknown mesh");
  if (n.parent) {
    auto& p = mutable_node(*n.parent);
    if (std::find(p.children.begin(), p.children.end(), n.id) == p.children.end()) {
      p.children.push_back(n.id);
    }
  } else {
    if (root_) throw InvalidArgument("model already has a root");
    root_ = n.id;
  }
  next_node_ = std::max(next_node_, to_underlying(n.id) + 1);
  nodes_.emplace(n.id, std::move(n));
}

std::vector<NodeId> SceneModel::subtree(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{id};
  node(id);
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    const auto& ch = nodes_.at(cur).children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<NodeId> SceneModel::preorder() const {
  if (!root_) return {};
  return subtree(*root_);
}

std::vector<NodeId> SceneModel::remove_subtree(NodeId id) {
  std::vector<NodeId> removed = subtree(id);
  const SceneNode& n = nodes_.at(id);
  if (n.parent) {
    auto& siblings = nodes_.at(*n.parent).children;
    siblings.erase(std::remove(siblings.begin(), siblings.end(), id), siblings.end());
  } else {
    root_.reset();
  }
  for (NodeId r : removed) nodes_.erase(r);
  return removed;
}

bool SceneModel::is_ancestor(NodeId ancestor, NodeId id) const {
  std::optional<NodeId> cur = node(id).parent;
  while (cur) {
    if (*cur == ancestor) return true;
    cur = nodes_.at(*cur).parent;
  }
  return false;
}

void SceneModel::reparent(NodeId id, NodeId new_parent) {
  if (id == new_parent || is_ancestor(id, new_parent)) {
    throw InvalidArgument("reparenting node " + id_str(id) + " would create a cycle");
  }
  SceneNode& n = mutable_node(id);
  if (!n.parent) throw InvalidArgument("cannot reparent the root");
  auto& old = nodes_.at(*n.parent).children;
  old.erase(std::remove(old.begin(), old.end(), id), old.end());
  mutable_node(new_parent).children.push_back(id);
  n.parent = new_parent;
}

void SceneModel::prune_meshes() {
  std::set<MeshId> used;
  for (const auto& [id, n] : nodes_) {
    if (n.mesh) used.insert(*n.mesh);
  }
  std::erase_if(meshes_, [&](const auto& kv) { return !used.count(kv.first); });
}

Mat4 SceneModel::world_matrix(NodeId id) const {
  Mat4 m = node(id).local_transform.matrix();
  std::optional<NodeId> cur = nodes_.at(id).parent;
  while (cur) {
    const SceneNode& p = nodes_.at(*cur);
    m = p.local_transform.matrix() * m;
    cur = p.parent;
  }
  Mat4 unit = Mat4::Identity();
  unit.block<3, 3>(0, 0) *= unit_scale_;
  return unit * m;
}

void SceneModel::validate() const {
  if (nodes_.empty()) {
    if (root_) throw InvalidArgument("root set on empty model");
    return;
  }
  if (!root_ || !nodes_.count(*root_)) throw InvalidArgument("model has no valid root");
  std::size_t roots = 0;
  for (const auto& [id, n] : nodes_) {
    if (n.id != id) throw InvalidArgument("node key/id mismatch at " + id_str(id));
    if (!n.parent) {
      ++roots;
    } else {
      auto p = nodes_.find(*n.parent);
      if (p == nodes_.end()) throw InvalidArgument("node " + id_str(id) + " has dangling parent");
      const auto& ch = p->second.children;
      if (std::count(ch.begin(), ch.end(), id) != 1) {
        throw InvalidArgument("parent/child links inconsistent at node " + id_str(id));
      }
    }
    for (NodeId c : n.children) {
      auto ci = nodes_.find(c);
      if (ci == nodes_.end() || ci->second.parent != id) {
        throw InvalidArgument("child link inconsistent at node " + id_str(id));
      }
    }
    if (n.mesh && !meshes_.count(*n.mesh)) {
      throw InvalidArgument("node " + id_str(id) + " references a missing mesh");
    }
    if (std::abs(n.local_transform.rotation.norm() - 1.0) > 1e-9) {
      throw InvalidArgument("non-unit rotation at node " + id_str(id));
    }
  }
  if (roots != 1) throw InvalidArgument("model must have exactly one root");
  // Reachability from the root rules out cycles among the remaining nodes.
  if (preorder().size() != nodes_.size()) throw InvalidArgument("node graph is not a tree");
  for (const auto& [id, m] : meshes_) m->validate();
}

namespace {

void extend_with_mesh(Aabb& box, const Mat4& world, const Mesh& mesh) {
  const Eigen::Matrix3d lin = world.block<3, 3>(0, 0);
  const Vec3 off = world.block<3, 1>(0, 3);
  if (mesh.triangle_count() == 0) return;
  for (const Vec3& p : mesh.positions()) box.extend(lin * p + off);
}

Mat4 unit_matrix(double s) {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(0, 0) *= s;
  return m;
}

}  // namespace

Aabb compute_world_bounds(const SceneModel& model, NodeId id) {
  const SceneNode& start = model.node(id);
  Mat4 base = start.parent ? model.world_matrix(*start.parent) : unit_matrix(model.unit_scale());
  Aabb box;
  std::vector<std::pair<NodeId, Mat4>> stack{{id, base}};
  while (!stack.empty()) {
    auto [cur, parent_world] = stack.back();
    stack.pop_back();
    const SceneNode& n = model.node(cur);
    Mat4 world = parent_world * n.local_transform.matrix();
    if (n.mesh) extend_with_mesh(box, world, model.mesh(*n.mesh));
    for (NodeId c : n.children) stack.emplace_back(c, world);
  }
  return box;
}

std::vector<FlatEntry> flatten(const SceneModel& model) {
  std::vector<FlatEntry> out;
  if (!model.root()) return out;
  std::vector<std::pair<NodeId, Mat4>> stack{{*model.root(), unit_matrix(model.unit_scale())}};
  while (!stack.empty()) {
    auto [cur, parent_world] = stack.back();
    stack.pop_back();
    const SceneNode& n = model.node(cur);
    Mat4 world = parent_world * n.local_transform.matrix();
    if (n.mesh) out.push_back({cur, world, *n.mesh});
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.emplace_back(*it, world);
  }
  return out;
}

std::map<NodeId, Aabb> own_mesh_world_bounds(const SceneModel& model) {
  std::map<NodeId, Aabb> out;
  for (const auto& [id, n] : model.nodes()) out.emplace(id, Aabb::empty());
  for (const FlatEntry& e : flatten(model)) {
    extend_with_mesh(out[e.node], e.world, model.mesh(e.mesh));
  }
  return out;
}

std::uint64_t node_triangles(const SceneModel& model, NodeId id, LodPolicy policy) {
  const SceneNode& n = model.node(id);
  if (!n.mesh) return 0;
  const Mesh& m = model.mesh(*n.mesh);
  return policy == LodPolicy::kLevel0 ? m.triangle_count(0) : m.triangle_count(n.lod_level);
}

std::uint64_t total_triangles(const SceneModel& model, LodPolicy policy) {
  std::uint64_t total = 0;
  for (const auto& [id, n] : model.nodes()) total += node_triangles(model, id, policy);
  return total;
}

}  // namespace orbitcad
