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

#include "orbitcad/render/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace orbitcad::reduction {

namespace {

double radical_inverse2(std::uint32_t i) {
  std::uint32_t bits = i;
  bits = (bits << 16) | (bits >> 16);
  bits = ((bits & 0x55555555u) << 1) | ((bits & 0xAAAAAAAAu) >> 1);
  bits = ((bits & 0x33333333u) << 2) | ((bits & 0xCCCCCCCCu) >> 2);
  bits = ((bits & 0x0F0F0F0Fu) << 4) | ((bits & 0xF0F0F0F0u) >> 4);
  bits = ((bits & 0x00FF00FFu) << 8) | ((bits & 0xFF00FF00u) >> 8);
  return static_cast<double>(bits) * 0x1p-32;
}

void check_encloses(const SceneModel& model, const Vec3& center, double radius) {
  const double limit = radius * (1.0 + 1e-9);
  for (const FlatEntry& e : flatten(model)) {
    const Mesh& mesh = model.mesh(e.mesh);
    for (const Triangle& t : mesh.triangles()) {
      for (std::uint32_t v : t) {
        if ((transform_point(e.world, mesh.positions()[v]) - center).norm() > limit) {
          throw InvalidArgument("visibility sphere does not enclose the model");
        }
      }
    }
  }
}

}  // namespace

std::vector<Vec3> camera_layout(int camera_count) {
  // Golden-angle azimuths with base-2 radical-inverse heights: the first n
  // points never depend on the total count.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(std::max(camera_count, 0)));
  for (int i = 0; i < camera_count; ++i) {
    double y = 2.0 * radical_inverse2(static_cast<std::uint32_t>(i) + 1) - 1.0;
    double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    double phi = golden * i;
    out.emplace_back(r * std::cos(phi), y, r * std::sin(phi));
  }
  return out;
}

std::vector<CubeFace> cube_faces(const Vec3& position, const Vec3& center, double radius) {
  Vec3 f = (center - position).normalized();
  Vec3 hint = std::abs(f.y()) < 0.9 ? Vec3::UnitY() : Vec3::UnitX();
  Vec3 r = f.cross(hint).normalized();
  Vec3 u = r.cross(f);
  const std::pair<Vec3, Vec3> dirs[] = {{f, u}, {r, u}, {-r, u}, {u, -f}, {-u, f}};
  std::vector<CubeFace> out;
  for (const auto& [d, up] : dirs) {
    render::Camera cam = render::Camera::look_at(position, position + d, up, std::numbers::pi / 2,
                                                 1.0, radius * 1e-3, radius * 2.01);
    out.push_back({cam.pose, cam.near_plane, cam.far_plane});
  }
  return out;
}

std::vector<NodeId> visible_mesh_nodes(const SceneModel& model, const Vec3& center, double radius,
                                       int camera_count, const VisibilityOptions& options) {
  if (!(radius > 0)) throw InvalidArgument("visibility sphere radius must be > 0");
  if (camera_count < 4) throw InvalidArgument("camera_count must be at least 4");
  check_encloses(model, center, radius);

  std::vector<render::DrawItem> items = render::make_draw_items(model, LodPolicy::kLevel0);
  std::vector<bool> seen(items.size(), false);
  render::RasterOptions ro;
  ro.shade = false;
  const render::Resolution res{options.resolution, options.resolution};
  for (const Vec3& dir : camera_layout(camera_count)) {
    for (const CubeFace& face : cube_faces(center + radius * dir, center, radius)) {
      render::Camera cam;
      cam.pose = face.pose;
      cam.fov_y = std::numbers::pi / 2;
      cam.aspect = 1.0;
      cam.near_plane = face.near_plane;
      cam.far_plane = face.far_plane;
      render::RenderResult rr = render::rasterize(items, cam, res, ro);
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (rr.item_visible[i]) seen[i] = true;
      }
    }
  }

  std::vector<NodeId> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (seen[i]) out.push_back(items[i].node);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> visibility_cull(const SceneModel& model, const Vec3& center, double radius,
                                    int camera_count, const VisibilityOptions& options) {
  std::set<NodeId> kept;
  for (NodeId id : visible_mesh_nodes(model, center, radius, camera_count, options)) {
    std::optional<NodeId> cur = id;
    while (cur && kept.insert(*cur).second) cur = model.node(*cur).parent;
  }
  return {kept.begin(), kept.end()};
}

}  // namespace orbitcad::reduction
