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

#include "fixtures.hpp"
#include "mesh_oracles.hpp"

#include "orbitcad/error.hpp"
#include "orbitcad/render/culling.hpp"
#include "orbitcad/render/draw_plan.hpp"
#include "orbitcad/render/raster.hpp"
#include "orbitcad/render/sprite_sheet.hpp"

#include <doctest.h>

#include <numeric>
#include <set>

using namespace orbitcad;
using namespace orbitcad::render;
using namespace orbitcad::testing;

namespace {

Camera front_camera(double distance = 5.0) {
  return Camera::look_at(Vec3(0, 0, distance), Vec3::Zero(), Vec3::UnitY(), 0.8, 1.0, 0.1, 100.0);
}

SceneModel single_cube(const Transform& t = {}) {
  SceneModel m;
  m.add_node("cube", std::nullopt, t, m.add_mesh(unit_cube()));
  return m;
}

std::vector<DrawCandidate> candidates(std::initializer_list<std::uint64_t> counts) {
  std::vector<DrawCandidate> out;
  std::uint32_t id = 1;
  for (auto c : counts) out.push_back({NodeId{id++}, c});
  return out;
}

std::set<NodeId> as_set(const std::vector<NodeId>& v) { return {v.begin(), v.end()}; }

std::vector<bool> mask(const Image& img, Rgba8 background) {
  std::vector<bool> out(static_cast<std::size_t>(img.width()) * img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out[static_cast<std::size_t>(y) * img.width() + x] = !(img.at(x, y) == background);
  }
  return out;
}

Image tile(const Image& sheet, int index, const SpriteGrid& g, Resolution t) {
  Image out(t.width, t.height);
  const int ox = (index % g.cols) * t.width, oy = (index / g.cols) * t.height;
  for (int y = 0; y < t.height; ++y) {
    for (int x = 0; x < t.width; ++x) out.set(x, y, sheet.at(ox + x, oy + y));
  }
  return out;
}

}  // namespace

TEST_CASE("draw plan hand traces") {
  auto three = candidates({600, 600, 600});
  auto plan = plan_iterative_draw(three, 1000);
  CHECK(plan.frames.size() == 3);

  auto many = candidates({10, 400, 30, 200, 5});
  CHECK(plan_iterative_draw(many, 645).frames.size() == 1);

  auto big = candidates({5000});
  auto single = plan_iterative_draw(big, 1000);
  REQUIRE(single.frames.size() == 1);
  CHECK(single.frames[0] == std::vector<NodeId>{NodeId{1}});

  auto mixed = candidates({300, 700, 5000, 300});
  auto p = plan_iterative_draw(mixed, 1000);
  REQUIRE(p.frames.size() == 3);
  CHECK(p.frames[0] == std::vector<NodeId>{NodeId{3}});
  CHECK(p.frames[1] == std::vector<NodeId>{NodeId{2}, NodeId{1}});
  CHECK(p.frames[2] == std::vector<NodeId>{NodeId{4}});

  CHECK_THROWS_AS(plan_iterative_draw(three, 0), InvalidArgument);
  CHECK(plan_iterative_draw(std::span<const DrawCandidate>{}, 10).frames.empty());
}

TEST_CASE("draw plan is complete and within budget on random sets") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<DrawCandidate> nodes;
    const int n = std::uniform_int_distribution<int>(0, 60)(rng);
    for (int i = 0; i < n; ++i) {
      nodes.push_back({NodeId{static_cast<std::uint32_t>(i * 3 + 1)}, std::uniform_int_distribution<std::uint64_t>(0, 3000)(rng)});
    }
    const std::uint64_t budget = std::uniform_int_distribution<std::uint64_t>(1, 4000)(rng);
    const DrawPlan plan = plan_iterative_draw(nodes, budget);
    std::map<NodeId, std::uint64_t> tri;
    for (const auto& c : nodes) tri[c.node] = c.triangles;
    std::multiset<NodeId> seen;
    for (const auto& f : plan.frames) {
      std::uint64_t sum = 0;
      for (NodeId id : f) {
        seen.insert(id);
        sum += tri.at(id);
      }
      CHECK((sum <= budget || f.size() == 1));
    }
    CHECK(seen.size() == nodes.size());
    CHECK(std::set<NodeId>(seen.begin(), seen.end()).size() == nodes.size());
    CHECK(plan_iterative_draw(nodes, budget).frames == plan.frames);
  }
}

TEST_CASE("draw candidates use the selected LOD counts") {
  SceneModel m;
  Mesh mesh = grid_surface(10, 10, 1, 1);
  mesh.set_lower_lods({LodLevel{std::vector<Triangle>(mesh.triangles().begin(), mesh.triangles().begin() + 20)}});
  const NodeId r = m.add_node("a", std::nullopt, {}, m.add_mesh(std::move(mesh)));
  m.mutable_node(r).lod_level = 1;
  auto c = draw_candidates(m);
  REQUIRE(c.size() == 1);
  CHECK(c[0].triangles == 20);
}

TEST_CASE("frustum culling trivial cases") {
  const Camera cam = front_camera();
  auto on_axis = make_draw_items(single_cube());
  CHECK(frustum_cull(on_axis, cam).size() == 1);
  auto behind = make_draw_items(single_cube(Transform::from_translation(Vec3(0, 0, 10))));
  CHECK(frustum_cull(behind, cam).empty());
}

TEST_CASE("frustum culling never drops a node with a vertex on screen") {
  std::mt19937_64 rng(101);
  const Resolution res{64, 64};
  for (int trial = 0; trial < 40; ++trial) {
    SceneModel m = random_tree(rng, 30);
    for (auto& [id, n] : m.nodes()) {
      if (n.parent) m.mutable_node(id).local_transform.translation *= 4.0;
    }
    const Camera cam = Camera::look_at(Vec3(0, 1, 6), Vec3::Zero(), Vec3::UnitY(), 0.7, 1.0, 0.1, 30.0);
    const auto items = make_draw_items(m);
    const auto kept = as_set(frustum_cull(items, cam));
    const ScreenMapper sm(cam, res);
    for (const DrawItem& it : items) {
      bool on_screen = false;
      const auto& P = it.mesh->positions();
      for (const Triangle& t : it.mesh->triangles()) {
        for (auto v : t) {
          const ScreenPoint sp = sm.project(transform_point(it.world, P[v]));
          on_screen |= sp.in_front && sp.depth <= 1.0 && sp.x >= 0 && sp.x <= res.width && sp.y >= 0 && sp.y <= res.height;
        }
      }
      if (on_screen) CHECK(kept.count(it.node) == 1);
    }
  }
}

TEST_CASE("occlusion culling hides a cube behind a wall") {
  SceneModel m;
  const NodeId root = m.add_node("root", std::nullopt);
  Transform wall;
  wall.scale = Vec3(20, 20, 0.2);
  m.add_node("wall", root, wall, m.add_mesh(unit_cube()));
  const NodeId small = m.add_node("small", root, Transform::from_translation(Vec3(0, 0, -3)), m.add_mesh(unit_cube()));
  const Camera cam = front_camera();
  const auto items = make_draw_items(m);
  const auto visible = as_set(occlusion_cull(items, cam, {128, 128}));
  CHECK(visible.count(small) == 0);
  CHECK(visible.size() == 1);

  const RenderResult oracle = rasterize(items, cam, {512, 512});
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].node == small) CHECK_FALSE(oracle.item_visible[i]);
  }

  auto lone = make_draw_items(single_cube());
  CHECK(occlusion_cull(lone, cam, {16, 16}).size() == 1);
}

TEST_CASE("frustum and occlusion culling keep every pixel-visible node") {
  std::mt19937_64 rng(55);
  const Resolution res{96, 96};
  for (int trial = 0; trial < 30; ++trial) {
    SceneModel m = random_tree(rng, 40, true);
    for (auto& [id, n] : m.nodes()) {
      if (n.parent) m.mutable_node(id).local_transform.translation *= 2.5;
    }
    const Camera cam = Camera::look_at(Vec3(0.3, 0.8, 7), Vec3::Zero(), Vec3::UnitY(), 0.9, 1.0, 0.1, 40.0);
    const auto items = make_draw_items(m);
    const RenderResult oracle = rasterize(items, cam, res);
    const auto frus = as_set(frustum_cull(items, cam));
    const auto occ = as_set(occlusion_cull(items, cam, res));
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!oracle.item_visible[i]) continue;
      CHECK(frus.count(items[i].node) == 1);
      CHECK(occ.count(items[i].node) == 1);
    }
  }
}

TEST_CASE("LOD selection extremes") {
  CHECK(select_lod_for_size(500.0, 4) == 0);
  CHECK(select_lod_for_size(200.0, 4) == 0);
  CHECK(select_lod_for_size(10.0, 4) == 3);
  CHECK(select_lod_for_size(1e9, 1) == 0);

  SceneModel m = single_cube();
  Mesh mesh = unit_cube();
  mesh.set_lower_lods({LodLevel{std::vector<Triangle>(mesh.triangles().begin(), mesh.triangles().begin() + 6)},
                       LodLevel{std::vector<Triangle>(mesh.triangles().begin(), mesh.triangles().begin() + 2)}});
  m.replace_mesh(*m.node(*m.root()).mesh, std::make_shared<const Mesh>(mesh));
  const auto items = make_draw_items(m, LodPolicy::kLevel0);
  const Camera near_cam = Camera::look_at(Vec3(0, 0, 0.61), Vec3::Zero(), Vec3::UnitY(), 0.8, 1.0, 0.1, 1000.0);
  CHECK(select_lod(items[0], near_cam, 256) == 0);
  const Camera far_cam = Camera::look_at(Vec3(0, 0, 900), Vec3::Zero(), Vec3::UnitY(), 0.8, 1.0, 0.1, 1000.0);
  CHECK(select_lod(items[0], far_cam, 256) == 2);
}

TEST_CASE("LOD index never decreases when the distance doubles") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.3, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double d = u(rng);
    const Vec3 dir = Vec3(u(rng) - 25, u(rng) - 25, u(rng) - 25).normalized();
    const DrawItem item = make_draw_items(single_cube())[0];
    const std::size_t lods = 1 + trial % 5;
    auto index_at = [&](double dist) {
      const Camera c = Camera::look_at(dir * dist, Vec3::Zero(), std::abs(dir.y()) > 0.9 ? Vec3::UnitX() : Vec3::UnitY(),
                                       0.8, 1.0, 0.01, 1e6);
      return select_lod_for_size(projected_diameter_px(item_bounds(item), c, 256), lods);
    };
    CHECK(index_at(2 * d) >= index_at(d));
  }
}

TEST_CASE("empty model renders background only") {
  const Rgba8 bg{10, 20, 30, 255};
  RasterOptions o;
  o.background = bg;
  const RenderResult r = rasterize(SceneModel{}, front_camera(), {32, 32}, o);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) CHECK(r.image.at(x, y) == bg);
  }
}

TEST_CASE("occlusion-only geometry hides what is behind it without colour") {
  SceneModel m;
  const NodeId root = m.add_node("root", std::nullopt);
  const NodeId sphere = m.add_node("sphere", root, Transform::from_translation(Vec3(0, 0, -1)), m.add_mesh(uv_sphere(24, 12, 1.0)));
  m.mutable_node(sphere).style.color = Vec3(1, 0, 0);
  Transform t = Transform::from_translation(Vec3(0, 0, 1));
  t.scale = Vec3(0.6, 0.6, 0.6);
  const NodeId shield = m.add_node("shield", root, t, m.add_mesh(unit_cube()));
  m.mutable_node(shield).style.occlusion_only = true;

  const Rgba8 bg{255, 255, 255, 255};
  RasterOptions o;
  o.background = bg;
  const Resolution res{128, 128};
  const Camera cam = front_camera(6);
  const auto items = make_draw_items(m);
  const RenderResult with = rasterize(items, cam, res, o);
  SceneModel alone = m;
  alone.remove_subtree(shield);
  const RenderResult without = rasterize(alone, cam, res, o);

  int hidden = 0;
  for (int y = 0; y < res.height; ++y) {
    for (int x = 0; x < res.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * res.width + x;
      if (with.owner[i] >= 0 && items[static_cast<std::size_t>(with.owner[i])].node == shield) {
        CHECK(with.image.at(x, y) == bg);
        if (!(without.image.at(x, y) == bg)) ++hidden;
      } else {
        CHECK(with.image.at(x, y) == without.image.at(x, y));
      }
    }
  }
  CHECK(hidden > 100);
}

TEST_CASE("cut plane equals rendering the pre-filtered triangle subset") {
  std::mt19937_64 rng(4);
  SceneModel m = random_tree(rng, 12);
  const Camera cam = Camera::look_at(Vec3(4, 1.5, 3), Vec3::Zero(), Vec3::UnitY(), 0.9, 1.0, 0.1, 50.0);
  const CutPlane plane{Axis::kX, compute_world_bounds(m, *m.root()).center().x()};
  RasterOptions cut;
  cut.cut_plane = plane;
  const Resolution res{96, 96};
  const auto items = make_draw_items(m);
  const RenderResult a = rasterize(items, cam, res, cut);

  std::vector<DrawItem> filtered = items;
  for (DrawItem& it : filtered) {
    std::vector<Triangle> keep;
    for (const Triangle& t : it.mesh->lod(it.lod).triangles) {
      const Vec3 c = (transform_point(it.world, it.mesh->positions()[t[0]]) + transform_point(it.world, it.mesh->positions()[t[1]]) +
                      transform_point(it.world, it.mesh->positions()[t[2]])) / 3.0;
      if (!cut_discards(plane, cam.position(), c)) keep.push_back(t);
    }
    it.mesh = std::make_shared<const Mesh>(it.mesh->positions(), keep);
    it.lod = 0;
  }
  const RenderResult b = rasterize(filtered, cam, res);
  CHECK(a.image == b.image);
  CHECK(a.depth == b.depth);
}

TEST_CASE("coverage is style invariant and rendering deterministic") {
  std::mt19937_64 rng(12);
  SceneModel m = random_tree(rng, 20);
  const Camera cam = Camera::look_at(Vec3(2, 3, 5), Vec3::Zero(), Vec3::UnitY(), 0.9, 1.0, 0.1, 50.0);
  const Resolution res{80, 60};
  const RenderResult a = rasterize(m, cam, res);
  const RenderResult again = rasterize(m, cam, res);
  CHECK(encode_png(a.image) == encode_png(again.image));
  SceneModel tinted = m;
  for (auto& [id, n] : m.nodes()) tinted.mutable_node(id).style.color = Vec3(0.2, 0.7, 0.1);
  const RenderResult b = rasterize(tinted, cam, res);
  CHECK(a.owner == b.owner);
  CHECK(a.depth == b.depth);
}

TEST_CASE("PNG round trip") {
  Image img(7, 5);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 7; ++x) img.set(x, y, Rgba8{static_cast<std::uint8_t>(x * 30), static_cast<std::uint8_t>(y * 40), 7, 255});
  }
  CHECK(decode_png(encode_png(img)) == img);
}

TEST_CASE("sprite grid geometry") {
  CHECK(sprite_grid(24).cols == 5);
  CHECK(sprite_grid(24).rows == 5);
  CHECK(sprite_grid(1).cols == 1);
  CHECK(sprite_grid(1).rows == 1);
  CHECK(sprite_grid(25).cols == 5);
  CHECK(sprite_grid(26).cols == 6);
  CHECK(sprite_grid(26).rows == 5);
  for (int n = 1; n <= 100; ++n) {
    const auto g = sprite_grid(n);
    CHECK(g.cols * g.rows >= n);
    CHECK(g.cols * (g.rows - 1) < n);
  }
}

TEST_CASE("sprite sheet is deterministic and opposed views mirror") {
  SpriteSheetOptions o;
  o.tile = {64, 64};
  const SceneModel cube = single_cube();
  const Image a = render_sprite_sheet(cube, o);
  CHECK(a.width() == 5 * 64);
  CHECK(a.height() == 5 * 64);
  CHECK(encode_png(a) == encode_png(render_sprite_sheet(cube, o)));

  // Tile 24 does not exist: it stays background.
  const Image blank = tile(a, 24, sprite_grid(24), o.tile);
  for (bool b : mask(blank, o.background)) CHECK_FALSE(b);

  const auto grid = sprite_grid(24);
  // Azimuths that are multiples of 45 degrees face the cube symmetrically.
  for (int i : {0, 3, 6, 9}) {
    const auto m0 = mask(tile(a, i, grid, o.tile), o.background);
    const auto m1 = mask(tile(a, i + 12, grid, o.tile), o.background);
    int diff = 0;
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) diff += m0[y * 64 + x] != m1[y * 64 + (63 - x)];
    }
    CHECK(diff == 0);
  }
}

TEST_CASE("orbit cameras step the azimuth evenly at fixed elevation") {
  SpriteSheetOptions o;
  const Aabb b = Aabb::from_min_max(Vec3(-1, -1, -1), Vec3(1, 1, 1));
  for (int i = 0; i < 24; ++i) {
    const Camera c = orbit_camera(b, i, o);
    const Vec3 d = (c.position() - b.center()).normalized();
    CHECK(std::asin(d.y()) == doctest::Approx(20.0 * std::numbers::pi / 180.0));
    CHECK(std::atan2(d.x(), d.z()) == doctest::Approx(std::remainder(2 * std::numbers::pi * i / 24, 2 * std::numbers::pi)));
  }
  CHECK_THROWS_AS(render_sprite_sheet(SceneModel{}, o), Error);
}
