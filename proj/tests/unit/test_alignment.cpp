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

#include "orbitcad/align/layout.hpp"
#include "orbitcad/align/pnp.hpp"
#include "orbitcad/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace orbitcad;
using namespace orbitcad::align;

namespace {

/// Marker roughly facing the camera about 1 m ahead, with a random tilt.
Pose random_pose(std::mt19937_64& rng, double distance = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Quat face(Eigen::AngleAxisd(std::numbers::pi, Vec3::UnitX()));
  const Quat tilt(Eigen::AngleAxisd(0.5 * u(rng), Vec3(u(rng), u(rng), u(rng)).normalized()));
  Pose p;
  p.rotation = (tilt * face).normalized();
  p.translation = Vec3(0.1 * u(rng), 0.1 * u(rng), distance * (1 + 0.1 * u(rng)));
  return p;
}

Eigen::Vector2d pinhole(const CameraIntrinsics& k, const Pose& pose, const Vec3& p) {
  const Vec3 c = pose.rotation.toRotationMatrix() * p + pose.translation;
  return {k.fx * c.x() / c.z() + k.cx, k.fy * c.y() / c.z() + k.cy};
}

double rotation_error(const Quat& a, const Quat& b) { return a.angularDistance(b); }

std::vector<Correspondence> observe(const TagLayout& layout, const CameraIntrinsics& k, const Pose& pose,
                                    std::mt19937_64* rng = nullptr, double sigma = 0.0) {
  std::normal_distribution<double> n(0.0, sigma);
  std::vector<Correspondence> out;
  for (const LayoutPoint& lp : layout.points) {
    Eigen::Vector2d px = pinhole(k, pose, lp.position);
    if (rng) px += Eigen::Vector2d(n(*rng), n(*rng));
    out.push_back({lp.position, px, lp.tag, lp.role});
  }
  return out;
}

}  // namespace

TEST_CASE("tag layout geometry") {
  const TagLayout l = build_tag_layout(0.08, 0.02);
  CHECK(l.points.size() == 20);
  CHECK(l.span() == doctest::Approx(0.18));
  CHECK(l.span() <= kLetterWidth);
  for (const auto& p : l.points) CHECK(p.position.z() == 0.0);
  for (int t = 0; t < 4; ++t) {
    Vec3 mean = Vec3::Zero();
    for (int r = 0; r < 4; ++r) mean += l.point(t, static_cast<PointRole>(r)) / 4.0;
    CHECK((mean - l.point(t, PointRole::kCenter)).norm() < 1e-12);
    const Vec3 tl = l.point(t, PointRole::kTopLeft), bl = l.point(t, PointRole::kBottomLeft);
    const Vec3 br = l.point(t, PointRole::kBottomRight);
    CHECK(tl.y() > bl.y());
    CHECK(br.x() > bl.x());
    CHECK((tl - bl).norm() == doctest::Approx(0.08));
  }
  CHECK(l.point(0, PointRole::kCenter).x() < l.point(1, PointRole::kCenter).x());
  CHECK(l.point(0, PointRole::kCenter).y() > l.point(2, PointRole::kCenter).y());
  Vec3 all = Vec3::Zero();
  for (const auto& p : l.points) all += p.position;
  CHECK(all.norm() < 1e-12);
  CHECK_THROWS_AS(build_tag_layout(0.15, 0.02), InvalidArgument);
  CHECK_THROWS_AS(build_tag_layout(-0.01, 0.02), InvalidArgument);
  const std::string svg = layout_svg(l);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("width=\"215.900mm\"") != std::string::npos);
}

TEST_CASE("projection matches a pinhole oracle") {
  std::mt19937_64 rng(1);
  const CameraIntrinsics k;
  const TagLayout l = build_tag_layout();
  for (int i = 0; i < 20; ++i) {
    const Pose p = random_pose(rng);
    const auto syn = synthesize(l, k, p);
    REQUIRE(syn.size() == 20);
    for (const auto& c : syn) CHECK((c.point2d - pinhole(k, p, c.point3d)).norm() < 1e-9);
  }
}

TEST_CASE("centered frontal marker projects symmetrically and is recovered") {
  const CameraIntrinsics k;
  const TagLayout l = build_tag_layout();
  Pose p;
  p.translation = Vec3(0, 0, 1);
  const auto pts = synthesize(l, k, p);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& c : pts) mean += c.point2d / 20.0;
  CHECK((mean - Eigen::Vector2d(k.cx, k.cy)).norm() < 1e-9);
  const PnpResult r = solve_pnp(pts, k);
  CHECK(rotation_error(r.pose.rotation, p.rotation) < 1e-6);
  CHECK((r.pose.translation - p.translation).norm() < 1e-9);
}

TEST_CASE("noiseless solves are exact") {
  std::mt19937_64 rng(2);
  const CameraIntrinsics k;
  const TagLayout l = build_tag_layout();
  for (int i = 0; i < 100; ++i) {
    const Pose p = random_pose(rng);
    const PnpResult r = solve_pnp(observe(l, k, p), k);
    CHECK(rotation_error(r.pose.rotation, p.rotation) < 1e-6);
    CHECK((r.pose.translation - p.translation).norm() < 1e-9);
    CHECK(r.rms_px < 1e-9);
    CHECK_FALSE(r.low_confidence);
  }
}

TEST_CASE("solver is deterministic") {
  std::mt19937_64 rng(3);
  const CameraIntrinsics k;
  const auto pts = observe(build_tag_layout(), k, random_pose(rng), &rng, 0.5);
  const PnpResult a = solve_pnp(pts, k), b = solve_pnp(pts, k);
  CHECK(a.pose.translation == b.pose.translation);
  CHECK(a.pose.rotation.coeffs() == b.pose.rotation.coeffs());
  CHECK(a.rms_px == b.rms_px);
  CHECK(reprojection_rms(pts, k, a.pose) == doctest::Approx(a.rms_px));
}

TEST_CASE("noisy solves stay within five millimeters and a dropped tag degrades gracefully") {
  std::mt19937_64 rng(4);
  const CameraIntrinsics k;
  const TagLayout l = build_tag_layout();
  std::vector<double> full, dropped;
  for (int i = 0; i < 300; ++i) {
    const Pose p = random_pose(rng);
    const auto pts = observe(l, k, p, &rng, 0.5);
    full.push_back((solve_pnp(pts, k).pose.translation - p.translation).norm());
    std::vector<Correspondence> rest;
    std::copy_if(pts.begin(), pts.end(), std::back_inserter(rest), [](const Correspondence& c) { return c.tag != 3; });
    REQUIRE(rest.size() == 15);
    dropped.push_back((occlusion_robust_solve(rest, k).pose.translation - p.translation).norm());
  }
  const auto within = std::count_if(full.begin(), full.end(), [](double e) { return e < 0.005; });
  CHECK(within >= 285);
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  CHECK(median(dropped) <= 2 * median(full));
}

TEST_CASE("minimal and degenerate inputs") {
  const CameraIntrinsics k;
  const TagLayout l = build_tag_layout();
  std::mt19937_64 rng(5);
  const Pose p = random_pose(rng);
  const auto pts = observe(l, k, p);
  std::vector<Correspondence> four(pts.begin(), pts.begin() + 4);
  const PnpResult r = occlusion_robust_solve(four, k);
  CHECK(r.low_confidence);
  CHECK((r.pose.translation - p.translation).norm() < 1e-6);
  std::vector<Correspondence> three(pts.begin(), pts.begin() + 3);
  CHECK_THROWS_AS(occlusion_robust_solve(three, k), InvalidArgument);

  std::vector<Correspondence> line;
  for (int i = 0; i < 6; ++i) {
    const Vec3 q(0.02 * i, 0, 0);
    line.push_back({q, pinhole(k, p, q)});
  }
  CHECK_THROWS_AS(solve_pnp(line, k), InvalidArgument);
  auto lifted = pts;
  lifted[0].point3d.z() = 0.05;
  CHECK_THROWS_AS(solve_pnp(lifted, k), InvalidArgument);
}

TEST_CASE("marker alignment transform") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2, 2);
  auto pose = [&] {
    Pose p;
    p.rotation = Quat(u(rng), u(rng), u(rng), u(rng)).normalized();
    p.translation = Vec3(u(rng), u(rng), u(rng));
    return p;
  };
  const Pose phys = pose();
  const Transform t0 = marker_to_session_transform(phys, Pose{});
  CHECK((t0.translation - phys.translation).norm() < 1e-12);
  CHECK(t0.rotation.angularDistance(phys.rotation) < 1e-12);
  const Transform same = marker_to_session_transform(phys, phys);
  CHECK(same.translation.norm() < 1e-12);
  CHECK(same.rotation.angularDistance(Quat::Identity()) < 1e-9);
  const TagLayout l = build_tag_layout();
  for (int i = 0; i < 50; ++i) {
    const Pose physical = pose(), placement = pose();
    const Transform t = marker_to_session_transform(physical, placement);
    for (const auto& lp : l.points) {
      const Vec3 model_point = placement.apply(lp.position);
      CHECK((transform_point(t.matrix(), model_point) - physical.apply(lp.position)).norm() < 1e-9);
    }
  }
}
