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

#include "orbitcad/render/camera.hpp"

#include "orbitcad/error.hpp"

#include <cmath>
#include <numbers>

namespace orbitcad::render {

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fov_y,
                       double aspect, double near_plane, double far_plane) {
  Vec3 back = eye - target;
  if (back.norm() == 0) throw InvalidArgument("look_at: eye equals target");
  back.normalize();
  Vec3 right = up.cross(back);
  if (right.norm() < 1e-12) {
    // Looking along `up`; pick any perpendicular.
    right = (std::abs(back.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(back);
  }
  right.normalize();
  Vec3 true_up = back.cross(right);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = true_up;
  r.col(2) = back;
  Camera c;
  c.pose.rotation = Quat(r).normalized();
  c.pose.translation = eye;
  c.fov_y = fov_y;
  c.aspect = aspect;
  c.near_plane = near_plane;
  c.far_plane = far_plane;
  c.validate();
  return c;
}

Mat4 Camera::view() const { return pose.inverse().matrix(); }

Mat4 Camera::projection() const {
  double f = 1.0 / std::tan(fov_y / 2);
  Mat4 p = Mat4::Zero();
  p(0, 0) = f / aspect;
  p(1, 1) = f;
  p(2, 2) = (far_plane + near_plane) / (near_plane - far_plane);
  p(2, 3) = 2 * far_plane * near_plane / (near_plane - far_plane);
  p(3, 2) = -1;
  return p;
}

void Camera::validate() const {
  if (!(near_plane > 0 && near_plane < far_plane)) throw InvalidArgument("camera requires 0 < near < far");
  if (!(fov_y > 0 && fov_y < std::numbers::pi)) throw InvalidArgument("camera fov must lie in (0, pi)");
  if (!(aspect > 0)) throw InvalidArgument("camera aspect must be positive");
}

}  // namespace orbitcad::render
