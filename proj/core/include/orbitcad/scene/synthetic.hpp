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

#include "orbitcad/scene/model.hpp"

namespace orbitcad {

/// Rectangular height field in the XY plane: 2 * nx * ny triangles.
Mesh grid_surface(int nx, int ny, double size_x, double size_y, double amplitude = 0.0);
/// Closed cylinder along +Z with its base at z = 0: 4 * segments triangles.
Mesh cylinder(int segments, double radius, double height);
/// Axis-aligned box centred at the origin with each face split into
/// subdiv x subdiv quads: 12 * subdiv^2 triangles.
Mesh box_mesh(const Vec3& half_extent, int subdiv = 1);

struct SyntheticAssemblySpec {
  std::uint64_t target_triangles = 3'500'000;
  std::uint64_t seed = 7;
  int panels = 12;
  int brackets = 40;
  int bolts = 2000;
  int washers = 1500;
};

/// Instrument-like assembly: dense instanced panels, brackets, and many small
/// bolts and washers. With at least one panel the level-0 triangle total
/// equals `target_triangles` exactly; small targets scale the part counts down.
SceneModel synthetic_assembly(const SyntheticAssemblySpec& spec = {});

}  // namespace orbitcad
