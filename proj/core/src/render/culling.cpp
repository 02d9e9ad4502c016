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

#include "orbitcad/render/culling.hpp"

#include <algorithm>
#include <cmath>

namespace orbitcad::render {

std::vector<NodeId> frustum_cull(std::span<const DrawItem> items, const Camera& camera) {
  const Mat4 m = camera.view_projection();
  // Gribb/Hartmann plane extraction; a point is inside when dot(plane, p) >= 0.
  std::array<Eigen::Vector4d, 6> planes = {
      Eigen::Vector4d(m.row(3) + m.row(0)), Eigen::Vector4d(m.row(3) - m.row(0)),
      Eigen::Vector4d(m.row(3) + m.row(1)), Eigen::Vector4d(m.row(3) - m.row(1)),
      Eigen::Vector4d(m.row(3) + m.row(2)), Eigen::Vector4d(m.row(3) - m.row(2)),
  };
  std::vector<NodeId> kept;
  for (const DrawItem& item : items) {
    Aabb box = item_bounds(item);
    if (box.is_empty()) continue;
    bool outside = false;
    for (const auto& pl : planes) {
      Vec3 p(pl.x() >= 0 ? box.max.x() : box.min.x(), pl.y() >= 0 ? box.max.y() : box.min.y(),
             pl.z() >= 0 ? box.max.z() : box.min.z());
      if (pl.head<3>().dot(p) + pl.w() < 0) {
        outside = true;
        break;
      }
    }
    if (!outside) kept.push_back(item.node);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

namespace {

struct ScreenRect {
  bool always_visible = false;
  bool empty = true;
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
  double near_depth = 1.0;
  double area = 0.0;
};

ScreenRect screen_rect(const Aabb& box, const ScreenMapper& mapper) {
  ScreenRect r;
  if (box.is_empty()) return r;
  Resolution res = mapper.resolution();
  double lx = INFINITY, ly = INFINITY, hx = -INFINITY, hy = -INFINITY;
  for (const Vec3& c : box.corners()) {
    ScreenPoint p = mapper.project(c);
    if (!p.in_front) {
      r.always_visible = true;
      r.empty = false;
      r.area = static_cast<double>(res.width) * res.height;
      r.x0 = 0, r.y0 = 0, r.x1 = res.width - 1, r.y1 = res.height - 1;
      r.near_depth = 0.0;
      return r;
    }
    lx = std::min(lx, p.x), hx = std::max(hx, p.x);
    ly = std::min(ly, p.y), hy = std::max(hy, p.y);
    r.near_depth = std::min(r.near_depth, p.depth);
  }
  // One pixel of slack absorbs vertex snapping in the rasterizer.
  r.x0 = std::max(0, static_cast<int>(std::floor(lx - 1.0)));
  r.y0 = std::max(0, static_cast<int>(std::floor(ly - 1.0)));
  r.x1 = std::min(res.width - 1, static_cast<int>(std::ceil(hx + 1.0)));
  r.y1 = std::min(res.height - 1, static_cast<int>(std::ceil(hy + 1.0)));
  r.empty = r.x0 > r.x1 || r.y0 > r.y1;
  double cw = std::max(0.0, std::min(hx, double(res.width)) - std::max(lx, 0.0));
  double ch = std::max(0.0, std::min(hy, double(res.height)) - std::max(ly, 0.0));
  r.area = cw * ch;
  return r;
}

}  // namespace

std::vector<NodeId> occlusion_cull(std::span<const DrawItem> items, const Camera& camera,
                                   Resolution res, const OcclusionOptions& options) {
  ScreenMapper mapper(camera, res);
  std::vector<ScreenRect> rects;
  rects.reserve(items.size());
  for (const DrawItem& item : items) rects.push_back(screen_rect(item_bounds(item), mapper));

  std::vector<std::size_t> order;
  const double screen_area = static_cast<double>(res.width) * res.height;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& s = items[i].style;
    bool opaque = s.occlusion_only || s.opacity >= 1.0;
    if (opaque && !rects[i].empty && rects[i].area >= options.min_occluder_area * screen_area) {
      order.push_back(i);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rects[a].area != rects[b].area) return rects[a].area > rects[b].area;
    return items[a].node < items[b].node;
  });
  if (order.size() > options.max_occluders) order.resize(options.max_occluders);
  std::sort(order.begin(), order.end());
  std::vector<DrawItem> occluders;
  for (auto i : order) occluders.push_back(items[i]);

  std::vector<double> depth(static_cast<std::size_t>(res.width) * res.height, 1.0);
  rasterize_depth(occluders, camera, res, depth);

  std::vector<NodeId> kept;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const ScreenRect& r = rects[i];
    if (r.empty) continue;
    bool visible = r.always_visible;
    for (int y = r.y0; !visible && y <= r.y1; ++y) {
      const double* row = &depth[static_cast<std::size_t>(y) * res.width];
      for (int x = r.x0; x <= r.x1; ++x) {
        if (row[x] >= r.near_depth) {
          visible = true;
          break;
        }
      }
    }
    if (visible) kept.push_back(items[i].node);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

double projected_diameter_px(const Aabb& bounds, const Camera& camera, int viewport_height) {
  if (bounds.is_empty()) return 0.0;
  double radius = 0.5 * bounds.diagonal();
  double dist = (bounds.center() - camera.position()).norm();
  if (dist <= radius) return INFINITY;
  // Angular diameter of the bounding sphere mapped through the vertical FOV.
  double half_angle = std::asin(radius / dist);
  return viewport_height * std::tan(half_angle) / std::tan(camera.fov_y / 2);
}

std::size_t select_lod_for_size(double px, std::size_t lod_count, const LodThresholds& th) {
  if (lod_count <= 1 || px >= th.full_detail_px) return 0;
  if (px < th.lowest_detail_px) return lod_count - 1;
  // Thresholds t_i = full * (lowest/full)^(i/(n-1)) for i = 1..n-1; the index
  // is how many of them exceed the projected size.
  std::size_t index = 0;
  const double n = static_cast<double>(lod_count - 1);
  for (std::size_t i = 1; i < lod_count; ++i) {
    double t = th.full_detail_px * std::pow(th.lowest_detail_px / th.full_detail_px, static_cast<double>(i) / n);
    if (px < t) ++index;
  }
  return index;
}

std::size_t select_lod(const DrawItem& item, const Camera& camera, int viewport_height,
                       const LodThresholds& thresholds) {
  std::size_t n = item.mesh ? item.mesh->lod_count() : 1;
  return select_lod_for_size(projected_diameter_px(item_bounds(item), camera, viewport_height), n, thresholds);
}

}  // namespace orbitcad::render
