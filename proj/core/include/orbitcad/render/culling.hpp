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

#include <span>
#include <vector>

namespace orbitcad::render {

/// Nodes whose world bounds intersect the view frustum (plane/p-vertex
/// test, so false keeps are possible and false culls are not).
std::vector<NodeId> frustum_cull(std::span<const DrawItem> items, const Camera& camera);

struct OcclusionOptions {
  std::size_t max_occluders = 64;
  /// Occluder candidates must cover at least this fraction of the viewport.
  double min_occluder_area = 0.0005;
};

/// Two-pass occlusion query: the largest on-screen opaque items are drawn
/// into a depth buffer, then every item's screen rectangle is tested against
/// it with the item's nearest bounds depth. Conservative at the given
/// resolution; items crossing the near plane are always kept.
std::vector<NodeId> occlusion_cull(std::span<const DrawItem> items, const Camera& camera,
                                   Resolution res, const OcclusionOptions& options = {});

struct LodThresholds {
  double full_detail_px = 200.0;
  double lowest_detail_px = 20.0;
};

/// Projected bounding-sphere diameter of `bounds` in pixels.
double projected_diameter_px(const Aabb& bounds, const Camera& camera, int viewport_height);

/// LOD index for an item: 0 at or above `full_detail_px`, the last level
/// below `lowest_detail_px`, geometric thresholds in between. Moving the
/// camera closer never increases the index.
std::size_t select_lod(const DrawItem& item, const Camera& camera, int viewport_height,
                       const LodThresholds& thresholds = {});
std::size_t select_lod_for_size(double diameter_px, std::size_t lod_count,
                                const LodThresholds& thresholds = {});

}  // namespace orbitcad::render
