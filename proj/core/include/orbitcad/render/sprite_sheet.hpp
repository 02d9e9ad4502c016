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

#include "orbitcad/render/raster.hpp"

#include <vector>

namespace orbitcad::render {

struct SpriteSheetOptions {
  int viewpoints = 24;
  Resolution tile{256, 256};
  double elevation_deg = 20.0;
  /// Bounding sphere is fit into the view with this fractional margin.
  double margin = 0.1;
  double fov_y = 0.785398163397448;
  Rgba8 background{255, 255, 255, 255};
  std::optional<CutPlane> cut_plane;
};

struct SpriteGrid {
  int cols = 0;
  int rows = 0;
};

/// cols = ceil(sqrt(n)), rows = ceil(n / cols).
SpriteGrid sprite_grid(int viewpoints);

/// Orbit camera for viewpoint `index`: azimuth 360/n * index measured from
/// +Z toward +X, fixed elevation above the XZ plane, +Y up, looking at the
/// bounds center from the distance that fits the bounding sphere.
Camera orbit_camera(const Aabb& bounds, int index, const SpriteSheetOptions& options);

/// Renders every viewpoint and stitches tiles row-major. Unused tiles stay
/// background. Throws Error("unrenderable") for a model with no geometry.
Image render_sprite_sheet(const SceneModel& model, const SpriteSheetOptions& options = {});

}  // namespace orbitcad::render
