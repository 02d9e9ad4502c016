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

#include "orbitcad/render/camera.hpp"
#include "orbitcad/render/image.hpp"
#include "orbitcad/scene/model.hpp"

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace orbitcad::render {

/// One mesh instance ready to draw: world matrix in meters plus style.
struct DrawItem {
  NodeId node{};
  Mat4 world = Mat4::Identity();
  std::shared_ptr<const Mesh> mesh;
  std::size_t lod = 0;
  RenderStyle style;
};

std::vector<DrawItem> make_draw_items(const SceneModel& model,
                                      LodPolicy policy = LodPolicy::kPerNodeSelected);

/// World bounds of an item (local bounds corner-swept through `world`).
Aabb item_bounds(const DrawItem& item);

/// Section plane perpendicular to a world axis at `offset` meters.
struct CutPlane {
  Axis axis = Axis::kX;
  double offset = 0.0;
};

/// True when the triangle's centroid lies on the camera's side of the plane
/// (such triangles are discarded before rasterization).
bool cut_discards(const CutPlane& plane, const Vec3& camera_position, const Vec3& centroid);

struct RasterOptions {
  std::optional<CutPlane> cut_plane;
  Rgba8 background{};
  /// When false only depth, ownership and visibility are produced.
  bool shade = true;
};

struct RenderResult {
  Image image;
  /// Window depth in [0, 1]; 1 where nothing was drawn.
  std::vector<float> depth;
  /// Index of the item that owns each pixel's depth, -1 for background.
  std::vector<std::int32_t> owner;
  /// Per item: some fragment survived depth testing (including translucent ones).
  std::vector<bool> item_visible;
};

/// Deterministic z-buffer rasterizer.
///
/// Vertices are snapped to 1/256 pixel and covered by integer edge functions
/// with a top-left fill rule, so adjacent triangles never double-cover or
/// leave cracks and output is identical on every IEEE-754 platform. Opaque
/// and occlusion-only items draw first in item order (ties keep the earlier
/// fragment); occlusion-only fragments write depth and reset color to the
/// background. Translucent items (opacity < 1) then composite back-to-front
/// by triangle centroid depth without writing depth. Shading is flat with a
/// headlight at the camera.
RenderResult rasterize(std::span<const DrawItem> items, const Camera& camera, Resolution res,
                       const RasterOptions& options = {});
RenderResult rasterize(const SceneModel& model, const Camera& camera, Resolution res,
                       const RasterOptions& options = {});

/// Shared projection used by the rasterizer and the culling queries.
struct ScreenPoint {
  double x = 0, y = 0;  // pixels, origin top-left, pixel centers at +0.5
  double depth = 0;     // window depth
  bool in_front = false;  // strictly beyond the near plane
};

class ScreenMapper {
 public:
  ScreenMapper(const Camera& camera, Resolution res);
  ScreenPoint project(const Vec3& world) const;
  const Mat4& view_projection() const { return vp_; }
  Resolution resolution() const { return res_; }

 private:
  Mat4 vp_;
  Resolution res_;
};

/// Depth-only raster of the given items into `depth` (size width*height,
/// initialised by the caller); same coverage and depth rules as `rasterize`.
void rasterize_depth(std::span<const DrawItem> items, const Camera& camera, Resolution res,
                     std::vector<double>& depth);

}  // namespace orbitcad::render
