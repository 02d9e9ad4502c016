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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <limits>

namespace orbitcad {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat4 = Eigen::Matrix4d;

/// Scale-then-rotate-then-translate rigid-ish transform. Composition
/// `a * b` applies `b` first. Composition is exact for uniform scale; a
/// non-uniform parent scale under a rotated child is approximated per axis
/// (use `matrix()` composition when exactness matters).
struct Transform {
  Vec3 translation = Vec3::Zero();
  Quat rotation = Quat::Identity();
  Vec3 scale = Vec3::Ones();

  static Transform identity() { return {}; }
  static Transform from_translation(const Vec3& t) {
    Transform x;
    x.translation = t;
    return x;
  }

  Vec3 apply(const Vec3& p) const { return translation + rotation * scale.cwiseProduct(p); }
  Mat4 matrix() const;
  Transform inverse() const;
  /// Renormalizes the quaternion; every producer of a Transform calls this.
  Transform& normalize();

  friend Transform operator*(const Transform& parent, const Transform& local);
  friend bool operator==(const Transform& a, const Transform& b) {
    return a.translation == b.translation && a.rotation.coeffs() == b.rotation.coeffs() &&
           a.scale == b.scale;
  }
};

/// Rigid transform (rotation then translation).
struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Mat4 matrix() const;
  Pose inverse() const;
  Transform to_transform() const;
  static Pose from_matrix(const Mat4& m);

  friend Pose operator*(const Pose& a, const Pose& b) {
    Pose out;
    out.rotation = (a.rotation * b.rotation).normalized();
    out.translation = a.rotation * b.translation + a.translation;
    return out;
  }
};

enum class Axis { kX = 0, kY = 1, kZ = 2 };

/// Axis-aligned bounds. The default value is the empty sentinel
/// (min = +inf, max = -inf) and absorbs under `extend`.
struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  static Aabb empty() { return {}; }
  static Aabb from_min_max(const Vec3& lo, const Vec3& hi) { return {lo, hi}; }

  bool is_empty() const { return (min.array() > max.array()).any(); }
  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    if (b.is_empty()) return;
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  double diagonal() const { return is_empty() ? 0.0 : extent().norm(); }
  bool contains(const Aabb& b, double eps = 0.0) const {
    if (b.is_empty()) return true;
    if (is_empty()) return false;
    return (b.min.array() >= min.array() - eps).all() && (b.max.array() <= max.array() + eps).all();
  }
  std::array<Vec3, 8> corners() const;
};

/// Bounds of `box` after an affine map; conservative (corner sweep).
Aabb transform_aabb(const Mat4& m, const Aabb& box);

inline Vec3 transform_point(const Mat4& m, const Vec3& p) {
  return m.block<3, 3>(0, 0) * p + m.block<3, 1>(0, 3);
}

}  // namespace orbitcad
