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

#include "orbitcad/align/pnp.hpp"

#include "orbitcad/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace orbitcad::align {

namespace {

using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

// Similarity taking the points to zero mean and mean distance sqrt(2).
Mat3 normalizer(const std::vector<Vec2>& pts) {
  Vec2 mean = Vec2::Zero();
  for (const Vec2& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double dist = 0;
  for (const Vec2& p : pts) dist += (p - mean).norm();
  dist /= static_cast<double>(pts.size());
  const double s = dist > 0 ? std::sqrt(2.0) / dist : 1.0;
  Mat3 t;
  t << s, 0, -s * mean.x(), 0, s, -s * mean.y(), 0, 0, 1;
  return t;
}

Mat3 homography(const std::vector<Vec2>& src, const std::vector<Vec2>& dst) {
  const Mat3 ts = normalizer(src), td = normalizer(dst);
  const auto n = static_cast<Eigen::Index>(src.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec3 p = ts * src[i].homogeneous();
    Vec3 q = td * dst[i].homogeneous();
    const double x = p.x(), y = p.y(), u = q.x(), v = q.y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return td.inverse() * hn * ts;
}

Pose pose_from_homography(const Mat3& h) {
  Vec3 h1 = h.col(0), h2 = h.col(1), h3 = h.col(2);
  double scale = 2.0 / (h1.norm() + h2.norm());
  if (h3.z() * scale < 0) scale = -scale;
  Vec3 r1 = h1 * scale, r2 = h2 * scale, t = h3 * scale;
  Mat3 r;
  r.col(0) = r1;
  r.col(1) = r2;
  r.col(2) = r1.cross(r2);
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 rot = svd.matrixU() * svd.matrixV().transpose();
  if (rot.determinant() < 0) {
    Mat3 u = svd.matrixU();
    u.col(2) = -u.col(2);
    rot = u * svd.matrixV().transpose();
  }
  Pose p;
  p.rotation = Quat(rot).normalized();
  p.translation = t;
  return p;
}

double cost(std::span<const Correspondence> pts, const CameraIntrinsics& k, const Pose& pose) {
  double c = 0;
  for (const Correspondence& x : pts) c += (project(k, pose, x.point3d) - x.point2d).squaredNorm();
  return c;
}

}  // namespace

Vec2 project(const CameraIntrinsics& k, const Pose& pose, const Vec3& p) {
  Vec3 c = pose.apply(p);
  return {k.fx * c.x() / c.z() + k.cx, k.fy * c.y() / c.z() + k.cy};
}

double reprojection_rms(std::span<const Correspondence> pts, const CameraIntrinsics& k, const Pose& pose) {
  if (pts.empty()) return 0.0;
  return std::sqrt(cost(pts, k, pose) / static_cast<double>(pts.size()));
}

PnpResult solve_pnp(std::span<const Correspondence> pts, const CameraIntrinsics& k, const PnpOptions& options) {
  if (pts.size() < 4) {
    throw InvalidArgument("PnP needs at least 4 correspondences, got " + std::to_string(pts.size()));
  }
  if (!(k.fx > 0) || !(k.fy > 0)) throw InvalidArgument("focal lengths must be positive");
  std::vector<Vec2> src, dst;
  double extent = 0;
  for (const Correspondence& c : pts) extent = std::max(extent, c.point3d.head<2>().cwiseAbs().maxCoeff());
  for (const Correspondence& c : pts) {
    if (std::abs(c.point3d.z()) > 1e-9 * std::max(extent, 1.0)) {
      throw InvalidArgument("PnP expects planar marker points with z = 0");
    }
    src.push_back(c.point3d.head<2>());
    dst.emplace_back((c.point2d.x() - k.cx) / k.fx, (c.point2d.y() - k.cy) / k.fy);
  }
  {
    Vec2 mean = Vec2::Zero();
    for (const Vec2& p : src) mean += p;
    mean /= static_cast<double>(src.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const Vec2& p : src) cov += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    if (!(eig.eigenvalues()(1) > 0) || eig.eigenvalues()(0) <= 1e-12 * eig.eigenvalues()(1)) {
      throw InvalidArgument("PnP correspondences are collinear");
    }
  }

  PnpResult result;
  result.pose = pose_from_homography(homography(src, dst));
  result.low_confidence = pts.size() < 8;

  const auto n = static_cast<Eigen::Index>(pts.size());
  double lambda = options.initial_lambda;
  double current = cost(pts, k, result.pose);
  Eigen::VectorXd r(2 * n);
  Eigen::MatrixXd jac(2 * n, 6);
  for (int it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;
    const Mat3 rot = result.pose.rotation.toRotationMatrix();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Correspondence& c = pts[static_cast<std::size_t>(i)];
      const Vec3 rx = rot * c.point3d;
      const Vec3 pc = rx + result.pose.translation;
      const double iz = 1.0 / pc.z();
      r(2 * i) = k.fx * pc.x() * iz + k.cx - c.point2d.x();
      r(2 * i + 1) = k.fy * pc.y() * iz + k.cy - c.point2d.y();
      Eigen::Matrix<double, 2, 3> dp;
      dp << k.fx * iz, 0, -k.fx * pc.x() * iz * iz, 0, k.fy * iz, -k.fy * pc.y() * iz * iz;
      jac.block<2, 3>(2 * i, 0) = dp * -skew(rx);
      jac.block<2, 3>(2 * i, 3) = dp;
    }
    const Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
    const Eigen::Matrix<double, 6, 1> g = jac.transpose() * r;
    bool accepted = false;
    double next = current;
    Pose candidate;
    while (lambda < 1e16) {
      Eigen::Matrix<double, 6, 6> a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Matrix<double, 6, 1> step = a.ldlt().solve(-g);
      const Vec3 w = step.head<3>();
      const double angle = w.norm();
      Quat dq = angle > 0 ? Quat(Eigen::AngleAxisd(angle, w / angle)) : Quat::Identity();
      candidate.rotation = (dq * result.pose.rotation).normalized();
      candidate.translation = result.pose.translation + step.tail<3>();
      next = cost(pts, k, candidate);
      if (std::isfinite(next) && next <= current) {
        accepted = true;
        lambda = std::max(lambda / 10, 1e-12);
        break;
      }
      lambda *= 10;
    }
    if (!accepted) break;
    const double decrease = current - next;
    result.pose = candidate;
    current = next;
    if (decrease <= options.tolerance * std::max(current + decrease, 1e-300)) break;
  }

  result.rms_px = std::sqrt(current / static_cast<double>(n));
  bool in_front = std::isfinite(current) && result.pose.translation.allFinite();
  for (const Correspondence& c : pts) in_front = in_front && result.pose.apply(c.point3d).z() > 0;
  if (!in_front) {
    throw Error("pnp_diverged", "PnP did not converge to a pose in front of the camera (rms " +
                                    std::to_string(result.rms_px) + " px)");
  }
  return result;
}

PnpResult occlusion_robust_solve(std::span<const Correspondence> pts, const CameraIntrinsics& k,
                                 const PnpOptions& options) {
  return solve_pnp(pts, k, options);
}

std::vector<Correspondence> synthesize(const TagLayout& layout, const CameraIntrinsics& k, const Pose& pose) {
  std::vector<Correspondence> out;
  for (const LayoutPoint& p : layout.points) out.push_back({p.position, project(k, pose, p.position), p.tag, p.role});
  return out;
}

Transform marker_to_session_transform(const Pose& physical, const Pose& virtual_placement) {
  return (physical * virtual_placement.inverse()).to_transform();
}

}  // namespace orbitcad::align
