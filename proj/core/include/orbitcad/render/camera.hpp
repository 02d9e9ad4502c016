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

namespace orbitcad::render {

/// Pinhole camera. `pose` maps camera space to world space; the camera looks
/// down its local -Z axis with +Y up (OpenGL convention).
struct Camera {
  Pose pose;
  double fov_y = 0.785398163397448;  // radians
  double aspect = 1.0;
  double near_plane = 0.01;
  double far_plane = 1000.0;

  static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fov_y,
                        double aspect, double near_plane, double far_plane);

  Vec3 position() const { return pose.translation; }
  Vec3 forward() const { return pose.rotation * Vec3(0, 0, -1); }
  Mat4 view() const;
  Mat4 projection() const;
  Mat4 view_projection() const { return projection() * view(); }
  /// Throws InvalidArgument unless 0 < near < far and 0 < fov < pi.
  void validate() const;
};

struct Resolution {
  int width = 256;
  int height = 256;
};

}  // namespace orbitcad::render
