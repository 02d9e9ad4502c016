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

#include "orbitcad/scene/geometry.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace orbitcad {

enum class NodeId : std::uint32_t {};
enum class MeshId : std::uint32_t {};

constexpr std::uint32_t to_underlying(NodeId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t to_underlying(MeshId id) { return static_cast<std::uint32_t>(id); }

using Triangle = std::array<std::uint32_t, 3>;

struct LodLevel {
  std::vector<Triangle> triangles;
  std::size_t triangle_count() const { return triangles.size(); }
};

/// Indexed triangle mesh. Every LOD level indexes the shared `positions`
/// buffer; level 0 is full fidelity and is never empty as a level (it may
/// hold zero triangles).
class Mesh {
 public:
  Mesh() : lods_(1) {}
  Mesh(std::vector<Vec3> positions, std::vector<Triangle> triangles);

  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<Triangle>& triangles() const { return lods_.front().triangles; }
  const std::vector<LodLevel>& lods() const { return lods_; }
  std::size_t lod_count() const { return lods_.size(); }
  std::size_t triangle_count(std::size_t level = 0) const;
  const LodLevel& lod(std::size_t level) const;

  /// Replaces levels 1..n. Throws if counts increase or indices are out of range.
  void set_lower_lods(std::vector<LodLevel> levels);

  /// Object-space bounds of the vertices referenced by level 0.
  Aabb local_bounds() const;

  /// Throws InvalidArgument when an invariant does not hold.
  void validate() const;

 private:
  std::vector<Vec3> positions_;
  std::vector<LodLevel> lods_;
};

struct RenderStyle {
  std::optional<Vec3> color;  // RGB in [0,1]
  double opacity = 1.0;
  bool occlusion_only = false;

  friend bool operator==(const RenderStyle&, const RenderStyle&) = default;
};

struct SceneNode {
  NodeId id{};
  std::string name;
  std::string node_type;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  Transform local_transform;
  std::optional<MeshId> mesh;
  RenderStyle style;
  /// LOD level used for per-node triangle accounting and export; clamped
  /// to the mesh's last level when read.
  std::uint32_t lod_level = 0;
};

enum class LodPolicy { kLevel0, kPerNodeSelected };

struct FlatEntry {
  NodeId node;
  Mat4 world;
  MeshId mesh;
};

/// In-memory scene graph. Meshes are shared immutable buffers so copying a
/// model to produce a new version is cheap.
class SceneModel {
 public:
  SceneModel() = default;
  explicit SceneModel(std::string model_id) : model_id_(std::move(model_id)) {}

  const std::string& model_id() const { return model_id_; }
  void set_model_id(std::string id) { model_id_ = std::move(id); }
  double unit_scale() const { return unit_scale_; }
  void set_unit_scale(double meters_per_unit);

  std::optional<NodeId> root() const { return root_; }
  const std::map<NodeId, SceneNode>& nodes() const { return nodes_; }
  const std::map<MeshId, std::shared_ptr<const Mesh>>& meshes() const { return meshes_; }
  bool empty() const { return nodes_.empty(); }

  bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
  const SceneNode& node(NodeId id) const;
  const Mesh& mesh(MeshId id) const;
  std::shared_ptr<const Mesh> mesh_ptr(MeshId id) const;

  MeshId add_mesh(Mesh mesh);
  MeshId add_mesh(std::shared_ptr<const Mesh> mesh);
  void replace_mesh(MeshId id, std::shared_ptr<const Mesh> mesh);
  /// Inserts a mesh under a caller-chosen id (deserialization).
  void insert_mesh(MeshId id, std::shared_ptr<const Mesh> mesh);
  /// Adds a node; with no parent the node becomes the root (only one allowed).
  NodeId add_node(std::string name, std::optional<NodeId> parent, Transform local = {},
                  std::optional<MeshId> mesh = std::nullopt);
  /// Inserts a node with a caller-chosen id (deserialization, importers).
  void insert_node(SceneNode node);

  SceneNode& mutable_node(NodeId id);
  /// Removes the node and its subtree; returns the removed ids in pre-order.
  std::vector<NodeId> remove_subtree(NodeId id);
  void reparent(NodeId id, NodeId new_parent);
  /// Drops meshes no node references.
  void prune_meshes();

  /// Pre-order (parent before child) node ids starting at the root.
  std::vector<NodeId> preorder() const;
  std::vector<NodeId> subtree(NodeId id) const;
  bool is_ancestor(NodeId ancestor, NodeId node) const;
  /// Local-to-meters matrix of `id` (includes unit_scale).
  Mat4 world_matrix(NodeId id) const;

  void validate() const;

 private:
  std::string model_id_;
  double unit_scale_ = 1.0;
  std::optional<NodeId> root_;
  std::map<NodeId, SceneNode> nodes_;
  std::map<MeshId, std::shared_ptr<const Mesh>> meshes_;
  std::uint32_t next_node_ = 0;
  std::uint32_t next_mesh_ = 0;
};

/// World-space (meters) bounds of `node`'s mesh and every descendant mesh.
/// A subtree without meshes yields Aabb::empty(). Throws UnknownNodeError.
Aabb compute_world_bounds(const SceneModel& model, NodeId node);

/// World bounds of each node's own mesh only (empty for meshless nodes),
/// computed in one pass.
std::map<NodeId, Aabb> own_mesh_world_bounds(const SceneModel& model);

std::uint64_t total_triangles(const SceneModel& model, LodPolicy policy = LodPolicy::kLevel0);
std::uint64_t node_triangles(const SceneModel& model, NodeId id,
                             LodPolicy policy = LodPolicy::kLevel0);

/// Depth-first, parent-before-child list of mesh-bearing nodes with
/// composed world matrices (meters).
std::vector<FlatEntry> flatten(const SceneModel& model);

}  // namespace orbitcad
