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

#include "fixtures.hpp"
#include "mesh_oracles.hpp"

#include "orbitcad/reduction/plan.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace orbitcad::testing {

struct NestedBoxScene {
  SceneModel model;
  std::set<NodeId> enclosed;
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Closed shells on a coarse grid, each holding smaller boxes (sometimes a
/// second level deep), plus free boxes in the empty cells.
inline NestedBoxScene nested_box_scene(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n;
  auto rotation = [&] { return Quat(n(rng), n(rng), n(rng), n(rng)).normalized(); };

  NestedBoxScene s;
  SceneModel& m = s.model;
  const NodeId root = m.add_node("root", std::nullopt);
  const double cell = 3.0;
  std::vector<int> cells{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::shuffle(cells.begin(), cells.end(), rng);
  const int shells = std::uniform_int_distribution<int>(2, 5)(rng);
  const int free_boxes = std::uniform_int_distribution<int>(1, 3)(rng);

  // Fills a shell of half-size `half` with boxes whose bounding spheres stay
  // strictly inside it.
  auto fill = [&](auto&& self, NodeId shell, double half, int depth) -> void {
    const int count = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int k = 0; k < count; ++k) {
      const double h = half * (0.15 + 0.2 * u(rng));
      const double room = half - h * std::sqrt(3.0) - 0.02 * half;
      Transform t;
      t.translation = Vec3(u(rng) * 2 - 1, u(rng) * 2 - 1, u(rng) * 2 - 1) * std::max(0.0, room) / std::sqrt(3.0);
      t.rotation = rotation();
      const NodeId id = m.add_node("inner", shell, t, m.add_mesh(box_mesh(Vec3::Constant(h))));
      s.enclosed.insert(id);
      if (depth == 0 && u(rng) < 0.3) self(self, id, h, 1);
    }
  };

  for (int i = 0; i < shells + free_boxes; ++i) {
    const int c = cells[static_cast<std::size_t>(i)];
    Transform t;
    t.translation = Vec3((c % 3 - 1) * cell, (u(rng) - 0.5) * 0.5, (c / 3 - 1) * cell);
    t.rotation = rotation();
    if (i < shells) {
      const double half = 0.6 + 0.4 * u(rng);
      const NodeId shell = m.add_node("shell", root, t, m.add_mesh(box_mesh(Vec3::Constant(half))));
      fill(fill, shell, half, 0);
    } else {
      m.add_node("free", root, t, m.add_mesh(box_mesh(Vec3::Constant(0.2 + 0.3 * u(rng)))));
    }
  }
  const Aabb b = compute_world_bounds(m, root);
  s.center = b.center();
  s.radius = 0.5 * b.diagonal() * 1.05;
  return s;
}

/// Möller-Trumbore; returns the ray parameter or +inf.
inline double ray_triangle(const Vec3& o, const Vec3& d, const std::array<Vec3, 3>& t) {
  const Vec3 e1 = t[1] - t[0], e2 = t[2] - t[0];
  const Vec3 p = d.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-14) return std::numeric_limits<double>::infinity();
  const Vec3 s = o - t[0];
  const double a = s.dot(p) / det;
  if (a < 0 || a > 1) return std::numeric_limits<double>::infinity();
  const Vec3 q = s.cross(e1);
  const double b = d.dot(q) / det;
  if (b < 0 || a + b > 1) return std::numeric_limits<double>::infinity();
  const double h = e2.dot(q) / det;
  return h > 0 ? h : std::numeric_limits<double>::infinity();
}

/// Mesh nodes with at least one sample point (triangle centroids and points
/// near each corner) reachable by an unobstructed ray from some camera.
inline std::set<NodeId> raycast_visible(const SceneModel& m, const std::vector<Vec3>& cameras) {
  struct Tri {
    std::array<Vec3, 3> p;
    std::size_t owner;
  };
  std::vector<Tri> tris;
  std::vector<NodeId> owners;
  for (const FlatEntry& e : flatten(m)) {
    const Mesh& mesh = m.mesh(e.mesh);
    for (const Triangle& t : mesh.triangles()) {
      tris.push_back({{transform_point(e.world, mesh.positions()[t[0]]), transform_point(e.world, mesh.positions()[t[1]]),
                       transform_point(e.world, mesh.positions()[t[2]])},
                      owners.size()});
    }
    owners.push_back(e.node);
  }
  std::vector<bool> seen(owners.size(), false);
  const double w[4][3] = {{1 / 3.0, 1 / 3.0, 1 / 3.0}, {0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}};
  for (const Vec3& cam : cameras) {
    for (const Tri& target : tris) {
      if (seen[target.owner]) continue;
      for (const auto& bw : w) {
        const Vec3 p = bw[0] * target.p[0] + bw[1] * target.p[1] + bw[2] * target.p[2];
        const Vec3 d = p - cam;
        const double dist = d.norm();
        const Vec3 dir = d / dist;
        bool blocked = false;
        for (const Tri& other : tris) {
          if (&other == &target) continue;
          if (ray_triangle(cam, dir, other.p) < dist * (1 - 1e-9)) {
            blocked = true;
            break;
          }
        }
        if (!blocked) {
          seen[target.owner] = true;
          break;
        }
      }
    }
  }
  std::set<NodeId> out;
  for (std::size_t i = 0; i < owners.size(); ++i) {
    if (seen[i]) out.insert(owners[i]);
  }
  return out;
}

inline std::vector<Vec3> camera_positions(const Vec3& center, double radius, int count) {
  std::vector<Vec3> out;
  for (const Vec3& d : reduction::camera_layout(count)) out.push_back(center + radius * d);
  return out;
}

}  // namespace orbitcad::testing
