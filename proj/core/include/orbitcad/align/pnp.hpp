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

#include "orbitcad/align/layout.hpp"

#include <span>
#include <vector>

namespace orbitcad::align {

/// Pinhole intrinsics in pixels. Camera frame: x right, y down, z forward.
struct CameraIntrinsics {
  double fx = 1000.0;
  double fy = 1000.0;
  double cx = 640.0;
  double cy = 360.0;
};

struct Correspondence {
  Vec3 point3d = Vec3::Zero();  // marker frame
  Eigen::Vector2d point2d = Eigen::Vector2d::Zero();  // pixels
  int tag = -1;
  PointRole role = PointRole::kCenter;
};

/// Projection of a marker-frame point under a marker-to-camera pose.
Eigen::Vector2d project(const CameraIntrinsics& k, const Pose& marker_to_camera, const Vec3& p);

/// Root mean square of the per-point pixel distances.
double reprojection_rms(std::span<const Correspondence> points, const CameraIntrinsics& k,
                        const Pose& marker_to_camera);

struct PnpOptions {
  double initial_lambda = 1e-3;
  double tolerance = 1e-12;  // relative cost decrease that ends refinement
  int max_iterations = 100;
};

struct PnpResult {
  Pose pose;  // marker to camera
  double rms_px = 0.0;
  int iterations = 0;
  bool low_confidence = false;  // fewer than 8 points
};

/// Planar PnP: normalized DLT homography, decomposition into an initial pose,
/// then Levenberg-Marquardt on reprojection error. Marker points must have
/// z = 0. Throws InvalidArgument for fewer than 4 points, non-planar or
/// collinear input, and Error("pnp_diverged") when the refined pose puts a
/// point behind the camera or is not finite.
PnpResult solve_pnp(std::span<const Correspondence> points, const CameraIntrinsics& k,
                    const PnpOptions& options = {});

/// Same solver on whatever subset of the layout was detected.
PnpResult occlusion_robust_solve(std::span<const Correspondence> points, const CameraIntrinsics& k,
                                 const PnpOptions& options = {});

/// Correspondences for `layout` seen from `pose` (noise-free).
std::vector<Correspondence> synthesize(const TagLayout& layout, const CameraIntrinsics& k, const Pose& pose);

/// Whole-model transform that moves the virtual marker placement onto the
/// physical marker: physical * virtual^-1.
Transform marker_to_session_transform(const Pose& physical_marker, const Pose& virtual_placement);

}  // namespace orbitcad::align
