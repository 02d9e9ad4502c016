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

#include "orbitcad/error.hpp"
#include "orbitcad/scene/container.hpp"

#include <doctest.h>

using namespace orbitcad;
using orbitcad::testing::random_transform;
using orbitcad::testing::random_tree;
using orbitcad::testing::unit_cube;

namespace {

// Oracle: push every referenced vertex through the composed matrices.
Aabb sweep_bounds(const SceneModel& m, NodeId n) {
  Aabb out;
  for (NodeId id : m.subtree(n)) {
    const SceneNode& node = m.node(id);
    if (!node.mesh) continue;
    Mat4 world = Mat4::Identity();
    for (std::optional<NodeId> cur = id; cur; cur = m.node(*cur).parent) {
      world = m.node(*cur).local_transform.matrix() * world;
    }
    Mat4 units = Mat4::Identity();
    units.topLeftCorner<3, 3>() *= m.unit_scale();
    world = units * world;
    const Mesh& mesh = m.mesh(*node.mesh);
    for (const Triangle& t : mesh.triangles()) {
      for (auto v : t) out.extend(transform_point(world, mesh.positions()[v]));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("centred unit cube has half-unit bounds") {
  SceneModel m;
  const NodeId r = m.add_node("cube", std::nullopt, {}, m.add_mesh(unit_cube()));
  const Aabb b = compute_world_bounds(m, r);
  CHECK(b.min.isApprox(Vec3(-0.5, -0.5, -0.5)));
  CHECK(b.max.isApprox(Vec3(0.5, 0.5, 0.5)));

  m.mutable_node(r).local_transform = Transform::from_translation(Vec3(1, 0, 0));
  const Aabb moved = compute_world_bounds(m, r);
  CHECK((moved.min - b.min).isApprox(Vec3(1, 0, 0)));
  CHECK((moved.max - b.max).isApprox(Vec3(1, 0, 0)));
}

TEST_CASE("meshless subtree yields the empty sentinel; unknown node throws") {
  SceneModel m;
  const NodeId r = m.add_node("root", std::nullopt);
  m.add_node("child", r);
  CHECK(compute_world_bounds(m, r).is_empty());
  CHECK_THROWS_AS(compute_world_bounds(m, NodeId{99}), UnknownNodeError);
}

TEST_CASE("world bounds match a per-vertex sweep on random trees") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    SceneModel m = random_tree(rng, 50, trial % 2 == 1);
    for (NodeId id : m.preorder()) {
      const Aabb got = compute_world_bounds(m, id);
      const Aabb want = sweep_bounds(m, id);
      REQUIRE(got.is_empty() == want.is_empty());
      if (got.is_empty()) continue;
      CHECK((got.min - want.min).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((got.max - want.max).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(compute_world_bounds(m, *m.root()).contains(got, 1e-12));
    }
  }
}

TEST_CASE("triangle totals count instances and ignore transforms") {
  SceneModel empty;
  CHECK(total_triangles(empty) == 0);

  SceneModel m;
  const MeshId cube = m.add_mesh(unit_cube());
  const NodeId r = m.add_node("root", std::nullopt);
  m.add_node("a", r, {}, cube);
  const NodeId b = m.add_node("b", r, Transform::from_translation(Vec3(2, 0, 0)), cube);
  CHECK(total_triangles(m) == 24);

  std::mt19937_64 rng(3);
  m.mutable_node(b).local_transform = random_transform(rng, 3.0, true);
  CHECK(total_triangles(m) == 24);

  const NodeId big = m.add_node("big", r, {}, m.add_mesh(grid_surface(10, 5, 1, 1)));
  CHECK(total_triangles(m) == 124);
  m.remove_subtree(big);
  CHECK(total_triangles(m) == 24);
}

TEST_CASE("per-node LOD accounting uses the clamped selected level") {
  SceneModel m;
  Mesh mesh = grid_surface(10, 10, 1, 1);
  mesh.set_lower_lods({LodLevel{std::vector<Triangle>(mesh.triangles().begin(), mesh.triangles().begin() + 50)}});
  const NodeId r = m.add_node("root", std::nullopt, {}, m.add_mesh(std::move(mesh)));
  CHECK(total_triangles(m, LodPolicy::kPerNodeSelected) == 200);
  m.mutable_node(r).lod_level = 1;
  CHECK(total_triangles(m, LodPolicy::kPerNodeSelected) == 50);
  m.mutable_node(r).lod_level = 7;
  CHECK(total_triangles(m, LodPolicy::kPerNodeSelected) == 50);
  CHECK(total_triangles(m, LodPolicy::kLevel0) == 200);
}

TEST_CASE("flatten composes transforms parent before child") {
  SceneModel m;
  const MeshId cube = m.add_mesh(unit_cube());
  const Transform step = Transform::from_translation(Vec3(1, 0, 0));
  const NodeId r = m.add_node("root", std::nullopt, step, cube);
  const NodeId a = m.add_node("a", r, step);
  const NodeId b = m.add_node("b", a, step, cube);

  auto flat = flatten(m);
  REQUIRE(flat.size() == 2);
  CHECK(flat[0].node == r);
  CHECK(flat[1].node == b);
  CHECK(flat[0].world.isApprox(step.matrix()));
  CHECK(transform_point(flat[1].world, Vec3::Zero()).isApprox(Vec3(3, 0, 0)));

  SceneModel single;
  single.add_node("only", std::nullopt, step, single.add_mesh(unit_cube()));
  auto one = flatten(single);
  REQUIRE(one.size() == 1);
  CHECK(one[0].world.isApprox(step.matrix()));
}

TEST_CASE("reparenting changes only the moved subtree") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    SceneModel m = random_tree(rng, 30);
    const auto order = m.preorder();
    const NodeId moved = order[std::uniform_int_distribution<std::size_t>(1, order.size() - 1)(rng)];
    NodeId target = *m.root();
    for (NodeId c : order) {
      if (!m.is_ancestor(moved, c) && c != moved && c != m.node(moved).parent) {
        target = c;
        break;
      }
    }
    if (target == m.node(moved).parent) continue;
    std::map<NodeId, Mat4> before;
    for (const auto& e : flatten(m)) before[e.node] = e.world;
    m.reparent(moved, target);
    for (const auto& e : flatten(m)) {
      const bool inside = e.node == moved || m.is_ancestor(moved, e.node);
      CHECK(e.world.isApprox(m.world_matrix(e.node)));
      if (!inside) CHECK(e.world == before.at(e.node));
    }
  }
}

TEST_CASE("container round trip is byte stable and keeps ids") {
  std::mt19937_64 rng(9);
  SceneModel m = random_tree(rng, 40, true);
  m.set_unit_scale(0.001);
  m.mutable_node(NodeId{3}).style.color = Vec3(1, 0, 0.5);
  m.mutable_node(NodeId{4}).style.occlusion_only = true;
  m.mutable_node(NodeId{4}).node_type = "bracket";
  const auto bytes = serialize(m);
  const SceneModel back = deserialize(bytes);
  CHECK(serialize(back) == bytes);
  CHECK(back.nodes().size() == m.nodes().size());
  for (const auto& [id, n] : m.nodes()) {
    REQUIRE(back.has_node(id));
    CHECK(back.node(id).name == n.name);
    CHECK(back.node(id).parent == n.parent);
    CHECK(back.node(id).local_transform == n.local_transform);
    CHECK(back.node(id).style == n.style);
  }
  CHECK(back.unit_scale() == 0.001);
  CHECK(total_triangles(back) == total_triangles(m));
}

TEST_CASE("corrupt containers are rejected") {
  SceneModel m;
  m.add_node("root", std::nullopt, {}, m.add_mesh(unit_cube()));
  auto bytes = serialize(m);
  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  CHECK_THROWS_AS(deserialize(truncated), Error);
  auto bad_magic = bytes;
  bad_magic[0] = std::byte{'X'};
  CHECK_THROWS_AS(deserialize(bad_magic), Error);
}

TEST_CASE("mesh invariants are enforced") {
  CHECK_THROWS_AS(Mesh({Vec3::Zero()}, {Triangle{0, 1, 2}}), InvalidArgument);
  Mesh cube = unit_cube();
  CHECK_THROWS_AS(cube.set_lower_lods({LodLevel{std::vector<Triangle>(13, Triangle{0, 1, 2})}}), InvalidArgument);
  Mesh empty({}, {});
  CHECK(empty.triangle_count() == 0);

  SceneModel m;
  m.add_node("root", std::nullopt);
  CHECK_THROWS(m.add_node("second root", std::nullopt));
}

TEST_CASE("quaternions stay normalized through composition") {
  std::mt19937_64 rng(1);
  Transform t;
  for (int i = 0; i < 1000; ++i) t = random_transform(rng) * t;
  CHECK(std::abs(t.rotation.norm() - 1.0) < 1e-9);
  const Transform inv = t.inverse();
  CHECK((inv * t).matrix().isApprox(Mat4::Identity(), 1e-9));
}

TEST_CASE("synthetic generators produce the documented triangle counts") {
  CHECK(grid_surface(7, 3, 1, 1).triangle_count() == 42);
  CHECK(cylinder(24, 1, 1).triangle_count() == 96);
  CHECK(box_mesh(Vec3(1, 1, 1), 4).triangle_count() == 192);
  SyntheticAssemblySpec spec;
  spec.target_triangles = 250'001;
  CHECK(total_triangles(synthetic_assembly(spec)) == 250'001);
}
