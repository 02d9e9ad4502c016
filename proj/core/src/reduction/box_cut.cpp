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

#include "orbitcad/reduction/plan.hpp"

#include <algorithm>
#include <map>

namespace orbitcad::reduction {

namespace {

bool separated(const Vec3& axis, const Vec3 (&v)[3], const Vec3& half) {
  if (axis.squaredNorm() < 1e-30) return false;
  double p0 = axis.dot(v[0]), p1 = axis.dot(v[1]), p2 = axis.dot(v[2]);
  double r = half.x() * std::abs(axis.x()) + half.y() * std::abs(axis.y()) + half.z() * std::abs(axis.z());
  return std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r;
}

bool has_geometry_below(const SceneModel& model, NodeId id) {
  for (NodeId d : model.subtree(id)) {
    if (d == id) continue;
    const SceneNode& n = model.node(d);
    if (n.mesh && model.mesh(*n.mesh).triangle_count() > 0) return true;
  }
  return false;
}

}  // namespace

bool triangle_intersects_box(const Vec3& a, const Vec3& b, const Vec3& c, const OrientedBox& box) {
  const Vec3 center = box.box.center();
  const Vec3 half = 0.5 * box.box.extent();
  const Eigen::Matrix3d rt = box.rotation.normalized().toRotationMatrix().transpose();
  const Vec3 v[3] = {rt * (a - center), rt * (b - center), rt * (c - center)};
  const Vec3 e[3] = {v[1] - v[0], v[2] - v[1], v[0] - v[2]};
  const Vec3 axes[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  for (const Vec3& ax : axes) {
    if (separated(ax, v, half)) return false;
  }
  if (separated(e[0].cross(e[1]), v, half)) return false;
  for (const Vec3& ax : axes) {
    for (const Vec3& ed : e) {
      if (separated(ax.cross(ed), v, half)) return false;
    }
  }
  return true;
}

SceneModel box_cut(const SceneModel& model, const OrientedBox& box, BoxMode mode,
                   std::vector<NodeId>* removed) {
  SceneModel out = model;
  std::map<std::pair<MeshId, std::vector<bool>>, MeshId> cache;
  std::vector<NodeId> emptied;
  const std::vector<NodeId> order = model.preorder();
  for (NodeId id : order) {
    const SceneNode& node = model.node(id);
    if (!node.mesh) continue;
    const Mesh& mesh = model.mesh(*node.mesh);
    if (mesh.triangle_count() == 0) continue;
    const Mat4 world = model.world_matrix(id);
    const auto& pos = mesh.positions();
    std::vector<bool> keep(mesh.triangle_count());
    bool all = true;
    bool none = true;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      const Triangle& t = mesh.triangles()[i];
      bool hit = triangle_intersects_box(transform_point(world, pos[t[0]]), transform_point(world, pos[t[1]]),
                                         transform_point(world, pos[t[2]]), box);
      keep[i] = (mode == BoxMode::kKeep) == hit;
      all = all && keep[i];
      none = none && !keep[i];
    }
    if (all) continue;
    SceneNode& target = out.mutable_node(id);
    target.lod_level = 0;
    if (none) {
      target.mesh.reset();
      emptied.push_back(id);
      continue;
    }
    auto key = std::make_pair(*node.mesh, keep);
    auto it = cache.find(key);
    if (it == cache.end()) {
      std::vector<Triangle> tris;
      for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i]) tris.push_back(mesh.triangles()[i]);
      }
      it = cache.emplace(std::move(key), out.add_mesh(Mesh(pos, std::move(tris)))).first;
    }
    target.mesh = it->second;
  }

  // Deepest first, so an emptied parent sees its children's fate.
  std::vector<NodeId> gone;
  for (auto it = emptied.rbegin(); it != emptied.rend(); ++it) {
    if (!out.has_node(*it) || has_geometry_below(out, *it)) continue;
    auto r = out.remove_subtree(*it);
    gone.insert(gone.end(), r.begin(), r.end());
  }
  out.prune_meshes();
  if (removed) {
    std::sort(gone.begin(), gone.end());
    *removed = std::move(gone);
  }
  return out;
}

}  // namespace orbitcad::reduction
