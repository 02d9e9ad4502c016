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

#include "orbitcad/scene/geometry.hpp"

#include <cmath>

namespace orbitcad {

Mat4 Transform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(0, 0) = rotation.toRotationMatrix() * scale.asDiagonal();
  m.block<3, 1>(0, 3) = translation;
  return m;
}

Transform Transform::inverse() const {
  Transform inv;
  inv.rotation = rotation.conjugate();
  inv.scale = scale.cwiseInverse();
  inv.translation = -inv.scale.cwiseProduct(inv.rotation * translation);
  inv.normalize();
  return inv;
}

Transform& Transform::normalize() {
  // Unit quaternions are left bit-identical.
  if (std::abs(rotation.squaredNorm() - 1.0) > 1e-14) rotation.normalize();
  return *this;
}

Transform operator*(const Transform& parent, const Transform& local) {
  Transform out;
  out.translation = parent.apply(local.translation);
  out.rotation = parent.rotation * local.rotation;
  out.scale = parent.scale.cwiseProduct(local.scale);
  out.normalize();
  return out;
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(0, 0) = rotation.toRotationMatrix();
  m.block<3, 1>(0, 3) = translation;
  return m;
}

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.conjugate();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Transform Pose::to_transform() const {
  Transform t;
  t.rotation = rotation;
  t.translation = translation;
  return t;
}

Pose Pose::from_matrix(const Mat4& m) {
  Pose p;
  Eigen::Matrix3d r = m.block<3, 3>(0, 0);
  p.rotation = Quat(r).normalized();
  p.translation = m.block<3, 1>(0, 3);
  return p;
}

std::array<Vec3, 8> Aabb::corners() const {
  std::array<Vec3, 8> c;
  for (int i = 0; i < 8; ++i) {
    c[i] = Vec3((i & 1) ? max.x() : min.x(), (i & 2) ? max.y() : min.y(),
                (i & 4) ? max.z() : min.z());
  }
  return c;
}

Aabb transform_aabb(const Mat4& m, const Aabb& box) {
  Aabb out;
  if (box.is_empty()) return out;
  for (const Vec3& c : box.corners()) out.extend(transform_point(m, c));
  return out;
}

}  // namespace orbitcad
