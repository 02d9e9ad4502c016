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

#include "orbitcad/render/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace orbitcad::render {

namespace {

constexpr int kSubpixelBits = 8;
constexpr std::int64_t kSubpixel = 1 << kSubpixelBits;
constexpr double kGuardBand = 2.0;

using Vec4 = Eigen::Vector4d;

struct FixedVertex {
  std::int64_t x, y;
  double depth;
};

/// Clips a triangle in homogeneous space against near/far and a guard band.
int clip_polygon(std::array<Vec4, 9>& poly, int n) {
  const std::array<Vec4, 6> planes = {
      Vec4(0, 0, 1, 1),            // near: z + w >= 0
      Vec4(0, 0, -1, 1),           // far
      Vec4(1, 0, 0, kGuardBand),   // left
      Vec4(-1, 0, 0, kGuardBand),  // right
      Vec4(0, 1, 0, kGuardBand),   // bottom
      Vec4(0, -1, 0, kGuardBand),  // top
  };
  std::array<Vec4, 9> tmp;
  for (const Vec4& pl : planes) {
    int m = 0;
    for (int i = 0; i < n; ++i) {
      const Vec4& a = poly[i];
      const Vec4& b = poly[(i + 1) % n];
      double da = pl.dot(a), db = pl.dot(b);
      if (da >= 0) tmp[m++] = a;
      if ((da >= 0) != (db >= 0)) {
        double t = da / (da - db);
        tmp[m++] = a + t * (b - a);
      }
      if (m >= 9) break;
    }
    n = m;
    std::copy(tmp.begin(), tmp.begin() + n, poly.begin());
    if (n < 3) return 0;
  }
  return n;
}

bool fully_inside(const std::array<Vec4, 3>& v) {
  for (const Vec4& c : v) {
    double w = c.w();
    if (!(c.z() + w >= 0 && w - c.z() >= 0 && std::abs(c.x()) <= kGuardBand * w &&
          std::abs(c.y()) <= kGuardBand * w)) {
      return false;
    }
  }
  return true;
}

FixedVertex to_fixed(const Vec4& c, Resolution res) {
  double x = (c.x() / c.w() * 0.5 + 0.5) * res.width;
  double y = (0.5 - c.y() / c.w() * 0.5) * res.height;
  double d = std::clamp(c.z() / c.w() * 0.5 + 0.5, 0.0, 1.0);
  return {std::llround(x * kSubpixel), std::llround(y * kSubpixel), d};
}

inline std::int64_t edge(const FixedVertex& a, const FixedVertex& b, std::int64_t px, std::int64_t py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

inline bool top_left(const FixedVertex& a, const FixedVertex& b) {
  std::int64_t dy = b.y - a.y, dx = b.x - a.x;
  return dy > 0 || (dy == 0 && dx < 0);
}

/// Calls `frag(x, y, depth)` for each covered pixel center.
template <typename Frag>
void raster_triangle(FixedVertex v0, FixedVertex v1, FixedVertex v2, Resolution res, Frag&& frag) {
  std::int64_t area = edge(v0, v1, v2.x, v2.y);
  if (area == 0) return;
  if (area < 0) {
    std::swap(v1, v2);
    area = -area;
  }
  auto lo_x = std::min({v0.x, v1.x, v2.x}), hi_x = std::max({v0.x, v1.x, v2.x});
  auto lo_y = std::min({v0.y, v1.y, v2.y}), hi_y = std::max({v0.y, v1.y, v2.y});
  auto first_px = [](std::int64_t lo) {
    // smallest p with p*S + S/2 >= lo
    std::int64_t num = lo - kSubpixel / 2;
    return num <= 0 ? -((-num) / kSubpixel) : (num + kSubpixel - 1) / kSubpixel;
  };
  auto last_px = [](std::int64_t hi) {
    std::int64_t num = hi - kSubpixel / 2;
    return num >= 0 ? num / kSubpixel : -((-num + kSubpixel - 1) / kSubpixel);
  };
  std::int64_t x0 = std::max<std::int64_t>(first_px(lo_x), 0);
  std::int64_t x1 = std::min<std::int64_t>(last_px(hi_x), res.width - 1);
  std::int64_t y0 = std::max<std::int64_t>(first_px(lo_y), 0);
  std::int64_t y1 = std::min<std::int64_t>(last_px(hi_y), res.height - 1);
  if (x0 > x1 || y0 > y1) return;

  const std::int64_t bias0 = top_left(v1, v2) ? 0 : -1;
  const std::int64_t bias1 = top_left(v2, v0) ? 0 : -1;
  const std::int64_t bias2 = top_left(v0, v1) ? 0 : -1;
  const std::int64_t step0 = -(v2.y - v1.y) * kSubpixel;
  const std::int64_t step1 = -(v0.y - v2.y) * kSubpixel;
  const std::int64_t step2 = -(v1.y - v0.y) * kSubpixel;
  const double inv_area = 1.0 / static_cast<double>(area);

  for (std::int64_t y = y0; y <= y1; ++y) {
    std::int64_t py = y * kSubpixel + kSubpixel / 2;
    std::int64_t px = x0 * kSubpixel + kSubpixel / 2;
    std::int64_t w0 = edge(v1, v2, px, py);
    std::int64_t w1 = edge(v2, v0, px, py);
    std::int64_t w2 = edge(v0, v1, px, py);
    for (std::int64_t x = x0; x <= x1; ++x, w0 += step0, w1 += step1, w2 += step2) {
      if (w0 + bias0 < 0 || w1 + bias1 < 0 || w2 + bias2 < 0) continue;
      double d = (static_cast<double>(w0) * v0.depth + static_cast<double>(w1) * v1.depth +
                  static_cast<double>(w2) * v2.depth) *
                 inv_area;
      frag(static_cast<int>(x), static_cast<int>(y), d);
    }
  }
}

/// Clips and rasterizes one world-space triangle.
template <typename Frag>
void draw_world_triangle(const Mat4& vp, const Vec3& a, const Vec3& b, const Vec3& c, Resolution res,
                         Frag&& frag) {
  std::array<Vec4, 3> clip = {vp * a.homogeneous(), vp * b.homogeneous(), vp * c.homogeneous()};
  if (fully_inside(clip)) {
    raster_triangle(to_fixed(clip[0], res), to_fixed(clip[1], res), to_fixed(clip[2], res), res, frag);
    return;
  }
  std::array<Vec4, 9> poly;
  std::copy(clip.begin(), clip.end(), poly.begin());
  int n = clip_polygon(poly, 3);
  if (n < 3) return;
  FixedVertex f0 = to_fixed(poly[0], res);
  for (int i = 1; i + 1 < n; ++i) {
    raster_triangle(f0, to_fixed(poly[i], res), to_fixed(poly[i + 1], res), res, frag);
  }
}

Rgba8 shade(const RenderStyle& style, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& eye) {
  Vec3 base = style.color.value_or(Vec3(0.8, 0.8, 0.8));
  Vec3 n = (b - a).cross(c - a);
  Vec3 l = eye - (a + b + c) / 3.0;
  double denom = n.norm() * l.norm();
  double cosv = denom > 0 ? std::abs(n.dot(l)) / denom : 0.0;
  double k = 0.25 + 0.75 * cosv;
  auto channel = [&](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v * k, 0.0, 1.0) * 255.0));
  };
  return {channel(base.x()), channel(base.y()), channel(base.z()), 255};
}

bool translucent(const RenderStyle& s) { return !s.occlusion_only && s.opacity < 1.0; }

}  // namespace

bool cut_discards(const CutPlane& plane, const Vec3& camera_position, const Vec3& centroid) {
  int k = static_cast<int>(plane.axis);
  bool camera_side = camera_position[k] - plane.offset >= 0;
  bool tri_side = centroid[k] - plane.offset >= 0;
  return camera_side == tri_side;
}

std::vector<DrawItem> make_draw_items(const SceneModel& model, LodPolicy policy) {
  std::vector<DrawItem> items;
  for (const FlatEntry& e : flatten(model)) {
    const SceneNode& n = model.node(e.node);
    DrawItem item;
    item.node = e.node;
    item.world = e.world;
    item.mesh = model.mesh_ptr(e.mesh);
    item.lod = policy == LodPolicy::kLevel0 ? 0 : std::min<std::size_t>(n.lod_level, item.mesh->lod_count() - 1);
    item.style = n.style;
    items.push_back(std::move(item));
  }
  return items;
}

Aabb item_bounds(const DrawItem& item) {
  if (!item.mesh || item.mesh->lod(item.lod).triangles.empty()) return Aabb::empty();
  return transform_aabb(item.world, item.mesh->local_bounds());
}

ScreenMapper::ScreenMapper(const Camera& camera, Resolution res) : vp_(camera.view_projection()), res_(res) {}

ScreenPoint ScreenMapper::project(const Vec3& world) const {
  Vec4 c = vp_ * world.homogeneous();
  ScreenPoint p;
  p.in_front = c.z() + c.w() > 0 && c.w() > 0;
  if (!p.in_front) return p;
  p.x = (c.x() / c.w() * 0.5 + 0.5) * res_.width;
  p.y = (0.5 - c.y() / c.w() * 0.5) * res_.height;
  p.depth = std::clamp(c.z() / c.w() * 0.5 + 0.5, 0.0, 1.0);
  return p;
}

void rasterize_depth(std::span<const DrawItem> items, const Camera& camera, Resolution res,
                     std::vector<double>& depth) {
  const Mat4 vp = camera.view_projection();
  for (const DrawItem& item : items) {
    const Mesh& mesh = *item.mesh;
    const auto& pos = mesh.positions();
    for (const Triangle& t : mesh.lod(item.lod).triangles) {
      Vec3 a = transform_point(item.world, pos[t[0]]);
      Vec3 b = transform_point(item.world, pos[t[1]]);
      Vec3 c = transform_point(item.world, pos[t[2]]);
      draw_world_triangle(vp, a, b, c, res, [&](int x, int y, double d) {
        double& z = depth[static_cast<std::size_t>(y) * res.width + x];
        if (d < z) z = d;
      });
    }
  }
}

RenderResult rasterize(std::span<const DrawItem> items, const Camera& camera, Resolution res,
                       const RasterOptions& options) {
  camera.validate();
  const std::size_t npix = static_cast<std::size_t>(res.width) * res.height;
  std::vector<double> depth(npix, 1.0);
  RenderResult out;
  out.owner.assign(npix, -1);
  out.item_visible.assign(items.size(), false);
  if (options.shade) out.image = Image(res.width, res.height, options.background);

  const Mat4 vp = camera.view_projection();
  const Vec3 eye = camera.position();

  struct Deferred {
    double view_depth;
    std::int32_t item;
    std::uint32_t tri;
  };
  std::vector<Deferred> deferred;
  const Vec3 fwd = camera.forward();

  for (std::size_t i = 0; i < items.size(); ++i) {
    const DrawItem& item = items[i];
    const auto idx = static_cast<std::int32_t>(i);
    const auto& pos = item.mesh->positions();
    const auto& tris = item.mesh->lod(item.lod).triangles;
    for (std::size_t ti = 0; ti < tris.size(); ++ti) {
      const Triangle& t = tris[ti];
      Vec3 a = transform_point(item.world, pos[t[0]]);
      Vec3 b = transform_point(item.world, pos[t[1]]);
      Vec3 c = transform_point(item.world, pos[t[2]]);
      Vec3 centroid = (a + b + c) / 3.0;
      if (options.cut_plane && cut_discards(*options.cut_plane, eye, centroid)) continue;
      if (translucent(item.style)) {
        deferred.push_back({(centroid - eye).dot(fwd), idx, static_cast<std::uint32_t>(ti)});
        continue;
      }
      Rgba8 color = options.background;
      if (options.shade && !item.style.occlusion_only) color = shade(item.style, a, b, c, eye);
      draw_world_triangle(vp, a, b, c, res, [&](int x, int y, double d) {
        std::size_t p = static_cast<std::size_t>(y) * res.width + x;
        if (!(d < depth[p])) return;
        depth[p] = d;
        out.owner[p] = idx;
        if (options.shade) out.image.set(x, y, color);
      });
    }
  }
  for (std::int32_t o : out.owner) {
    if (o >= 0) out.item_visible[o] = true;
  }

  std::stable_sort(deferred.begin(), deferred.end(), [](const Deferred& l, const Deferred& r) {
    if (l.view_depth != r.view_depth) return l.view_depth > r.view_depth;
    if (l.item != r.item) return l.item < r.item;
    return l.tri < r.tri;
  });
  for (const Deferred& f : deferred) {
    const DrawItem& item = items[f.item];
    const auto& pos = item.mesh->positions();
    const Triangle& t = item.mesh->lod(item.lod).triangles[f.tri];
    Vec3 a = transform_point(item.world, pos[t[0]]);
    Vec3 b = transform_point(item.world, pos[t[1]]);
    Vec3 c = transform_point(item.world, pos[t[2]]);
    Rgba8 src = shade(item.style, a, b, c, eye);
    const int alpha = static_cast<int>(std::lround(std::clamp(item.style.opacity, 0.0, 1.0) * 255.0));
    draw_world_triangle(vp, a, b, c, res, [&](int x, int y, double d) {
      std::size_t p = static_cast<std::size_t>(y) * res.width + x;
      if (!(d < depth[p])) return;
      out.item_visible[f.item] = true;
      if (!options.shade) return;
      Rgba8 dst = out.image.at(x, y);
      auto mix = [&](int s, int dch) { return static_cast<std::uint8_t>((s * alpha + dch * (255 - alpha) + 127) / 255); };
      Rgba8 o{mix(src.r, dst.r), mix(src.g, dst.g), mix(src.b, dst.b),
              static_cast<std::uint8_t>(alpha + (dst.a * (255 - alpha) + 127) / 255)};
      out.image.set(x, y, o);
    });
  }

  out.depth.resize(npix);
  for (std::size_t p = 0; p < npix; ++p) out.depth[p] = static_cast<float>(depth[p]);
  return out;
}

RenderResult rasterize(const SceneModel& model, const Camera& camera, Resolution res,
                       const RasterOptions& options) {
  auto items = make_draw_items(model);
  return rasterize(items, camera, res, options);
}

}  // namespace orbitcad::render
