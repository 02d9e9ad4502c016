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

#include "orbitcad/render/sprite_sheet.hpp"

#include "orbitcad/error.hpp"

#include <cmath>
#include <numbers>

namespace orbitcad::render {

SpriteGrid sprite_grid(int viewpoints) {
  if (viewpoints < 1) throw InvalidArgument("viewpoint count must be at least 1");
  SpriteGrid g;
  g.cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(viewpoints))));
  // Guard the float sqrt for perfect squares.
  while ((g.cols - 1) * (g.cols - 1) >= viewpoints) --g.cols;
  while (g.cols * g.cols < viewpoints) ++g.cols;
  g.rows = (viewpoints + g.cols - 1) / g.cols;
  return g;
}

Camera orbit_camera(const Aabb& bounds, int index, const SpriteSheetOptions& options) {
  const double pi = std::numbers::pi;
  double radius = std::max(0.5 * bounds.diagonal(), 1e-6);
  double aspect = static_cast<double>(options.tile.width) / options.tile.height;
  double half_fov = std::min(options.fov_y / 2, std::atan(std::tan(options.fov_y / 2) * aspect));
  double distance = (1.0 + options.margin) * radius / std::sin(half_fov);
  double theta = 2.0 * pi * index / options.viewpoints;
  double elev = options.elevation_deg * pi / 180.0;
  Vec3 dir(std::cos(elev) * std::sin(theta), std::sin(elev), std::cos(elev) * std::cos(theta));
  Vec3 center = bounds.center();
  return Camera::look_at(center + distance * dir, center, Vec3::UnitY(), options.fov_y, aspect,
                         std::max(distance - 2 * radius, distance * 1e-3), distance + 2 * radius);
}

Image render_sprite_sheet(const SceneModel& model, const SpriteSheetOptions& options) {
  SpriteGrid grid = sprite_grid(options.viewpoints);
  std::vector<DrawItem> items = make_draw_items(model);
  Aabb bounds;
  for (const DrawItem& item : items) {
    if (item.mesh && item.mesh->triangle_count(item.lod) > 0) bounds.extend(item_bounds(item));
  }
  if (bounds.is_empty()) throw Error("unrenderable", "model has no renderable geometry");

  Image sheet(grid.cols * options.tile.width, grid.rows * options.tile.height, options.background);
  RasterOptions ro;
  ro.background = options.background;
  ro.cut_plane = options.cut_plane;
  for (int i = 0; i < options.viewpoints; ++i) {
    Camera cam = orbit_camera(bounds, i, options);
    RenderResult r = rasterize(items, cam, options.tile, ro);
    sheet.blit(r.image, (i % grid.cols) * options.tile.width, (i / grid.cols) * options.tile.height);
  }
  return sheet;
}

}  // namespace orbitcad::render
