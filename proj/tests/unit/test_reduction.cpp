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
#include "scenes.hpp"

#include "orbitcad/reduction/plan.hpp"

#include <doctest.h>

#include <set>

using namespace orbitcad;
using namespace orbitcad::reduction;
using namespace orbitcad::testing;

namespace {

std::set<NodeId> as_set(const std::vector<NodeId>& v) { return {v.begin(), v.end()}; }

std::optional<std::size_t> plan_error_step(const ReductionPlan& plan, const SceneModel* model = nullptr) {
  try {
    if (model) {
      apply_plan(*model, plan);
    } else {
      validate_plan(plan);
    }
  } catch (const PlanError& e) {
    return e.step_index().value_or(9999);
  }
  return std::nullopt;
}

ReductionPlan plan_of(std::vector<ReductionStep> steps) {
  ReductionPlan p;
  p.steps = std::move(steps);
  return p;
}

Mesh quad() {
  return Mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}, {{0, 1, 2}, {0, 2, 3}});
}

bool oracle_m_digits(const std::string& s) {
  if (s.size() < 2 || s[0] != 'M') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

TEST_CASE("plan JSON round trip covers every step") {
  ReductionPlan p;
  p.model_id = "m1";
  p.ideal_budget = 100;
  p.hard_budget = 200;
  OrientedBox box{Aabb::from_min_max(Vec3(-1, -2, -3), Vec3(1, 2, 3)), Quat(0.5, 0.5, 0.5, 0.5)};
  p.steps = {RemoveNodes{{NodeId{3}, NodeId{4}}},
             RemoveBySize{0.05},
             RemoveByName{"^M[0-9]+$", true},
             RemoveByType{"fastener"},
             VisibilityCull{Vec3(1, 2, 3), 10.0, 32},
             BoxCut{box, BoxMode::kCut},
             SetColor{std::nullopt, Vec3(1, 0, 0)},
             SetOpacity{std::vector<NodeId>{NodeId{2}}, 0.25},
             SetOcclusionOnly{std::vector<NodeId>{NodeId{7}}, false},
             ApplyLod{std::nullopt, {0.5, 0.25}, 2}};
  const std::string text = plan_to_json(p);
  const ReductionPlan q = plan_from_json(text);
  CHECK(plan_to_json(q) == text);
  REQUIRE(q.steps.size() == p.steps.size());
  for (std::size_t i = 0; i < p.steps.size(); ++i) CHECK(step_name(q.steps[i]) == step_name(p.steps[i]));
  CHECK(q.model_id == "m1");
  CHECK(q.ideal_budget == 100);
  CHECK(std::get<BoxCut>(q.steps[5]).box.rotation.coeffs() == box.rotation.coeffs());
  CHECK_FALSE(std::get<SetColor>(q.steps[6]).ids.has_value());
}

TEST_CASE("plan parsing defaults") {
  const ReductionPlan p = plan_from_json(R"({"steps":[{"op":"visibility_cull","center":[0,0,0],"radius":2},
    {"op":"box_cut","min":[0,0,0],"max":[1,1,1]}]})");
  CHECK(p.ideal_budget == 2'000'000);
  CHECK(p.hard_budget == 3'000'000);
  CHECK(std::get<VisibilityCull>(p.steps[0]).camera_count == 64);
  CHECK(std::get<BoxCut>(p.steps[1]).mode == BoxMode::kKeep);
}

TEST_CASE("validation names the offending step") {
  const OrientedBox flat{Aabb::from_min_max(Vec3(0, 0, 0), Vec3(1, 1, 0))};
  const std::vector<std::pair<ReductionStep, const char*>> bad = {
      {RemoveNodes{}, "empty ids"},
      {RemoveBySize{-1}, "negative size"},
      {RemoveByName{"", false}, "empty pattern"},
      {RemoveByName{"([", true}, "bad regex"},
      {RemoveByType{""}, "empty type"},
      {VisibilityCull{Vec3::Zero(), 0.0, 64}, "zero radius"},
      {VisibilityCull{Vec3::Zero(), 1.0, 3}, "few cameras"},
      {BoxCut{flat, BoxMode::kKeep}, "flat box"},
      {SetColor{std::nullopt, Vec3(2, 0, 0)}, "color range"},
      {SetOpacity{std::nullopt, 1.5}, "opacity range"},
      {SetOcclusionOnly{std::vector<NodeId>{}, true}, "empty selection"},
      {ApplyLod{std::nullopt, {0.5, 0.5}}, "non-decreasing ratios"},
      {ApplyLod{std::nullopt, {}}, "no ratios"},
  };
  for (const auto& [step, what] : bad) {
    CAPTURE(what);
    CHECK(plan_error_step(plan_of({RemoveBySize{0.1}, step})) == 1u);
  }
  ReductionPlan inverted;
  inverted.ideal_budget = 5;
  inverted.hard_budget = 4;
  CHECK(plan_error_step(inverted) == 9999u);
}

TEST_CASE("malformed plan documents") {
  auto step_of = [](const char* text) -> std::optional<std::size_t> {
    try {
      plan_from_json(text);
    } catch (const PlanError& e) {
      return e.step_index().value_or(9999);
    }
    return std::nullopt;
  };
  CHECK(step_of("{") == 9999u);
  CHECK(step_of("[]") == 9999u);
  CHECK(step_of(R"({"steps":[{"op":"remove_by_size","threshold":1},{"op":"explode"}]})") == 1u);
  CHECK(step_of(R"({"steps":[{"op":"remove_by_size"}]})") == 0u);
  CHECK(step_of(R"({"steps":[{"op":"box_cut","min":[0,0,0],"max":[1,1,1],"mode":"slice"}]})") == 0u);
  CHECK(step_of(R"({"steps":[{"op":"set_color","ids":[-1],"rgb":[1,1,1]}]})") == 0u);
  CHECK(step_of(R"({"steps":[{"op":"remove_by_name","pattern":"(","regex":true}]})") == 0u);
}

TEST_CASE("budget verdict boundaries") {
  CHECK(budget_verdict(2'000'000, 2'000'000, 3'000'000) == Verdict::kUnderIdeal);
  CHECK(budget_verdict(2'000'001, 2'000'000, 3'000'000) == Verdict::kUnderHard);
  CHECK(budget_verdict(3'000'000, 2'000'000, 3'000'000) == Verdict::kUnderHard);
  CHECK(budget_verdict(3'000'001, 2'000'000, 3'000'000) == Verdict::kOver);
  CHECK(verdict_name(Verdict::kUnderIdeal) == "under_ideal");
  CHECK(verdict_name(Verdict::kUnderHard) == "under_hard");
  CHECK(verdict_name(Verdict::kOver) == "over");
}

TEST_CASE("remove by size picks the small node only") {
  SceneModel m;
  const NodeId root = m.add_node("root", std::nullopt);
  const NodeId small = m.add_node("small", root, {}, m.add_mesh(box_mesh(Vec3::Constant(0.01 / (2 * std::sqrt(3.0))))));
  const NodeId big = m.add_node("big", root, Transform::from_translation(Vec3(1, 0, 0)),
                                m.add_mesh(box_mesh(Vec3::Constant(0.2 / (2 * std::sqrt(3.0))))));
  const auto r = apply_plan(m, plan_of({RemoveBySize{0.05}}));
  CHECK_FALSE(r.model.has_node(small));
  CHECK(r.model.has_node(big));
  CHECK(r.model.has_node(root));
  CHECK(r.report.steps[0].removed == std::vector<NodeId>{small});
  CHECK(r.report.steps[0].triangle_delta == 12);
  CHECK(select_nodes(m, BySize{0.0}).empty());
}

TEST_CASE("remove by size agrees with a vertex-bounds oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const SceneModel m = random_tree(rng, 40, true);
    const double threshold = 0.3 + 0.1 * trial;
    std::set<NodeId> expected;
    for (const FlatEntry& e : flatten(m)) {
      Aabb b;
      for (const Vec3& p : m.mesh(e.mesh).positions()) b.extend(transform_point(e.world, p));
      if (b.diagonal() < threshold) expected.insert(e.node);
    }
    CHECK(as_set(select_nodes(m, BySize{threshold})) == expected);
  }
}

TEST_CASE("name and type selection") {
  SceneModel m;
  const NodeId root = m.add_node("assembly", std::nullopt);
  const NodeId brkt = m.add_node("BRKT_01", root);
  m.add_node("panel", root);
  m.add_node("brkt_lower", root);
  m.mutable_node(brkt).node_type = "bracket";
  CHECK(select_nodes(m, ByName{"BRKT", false}) == std::vector<NodeId>{brkt});
  CHECK(select_nodes(m, ByType{"bracket"}) == std::vector<NodeId>{brkt});
  CHECK(select_nodes(m, ByType{"brack"}).empty());
  CHECK_THROWS_AS(select_nodes(m, ByName{"[", true}), InvalidArgument);
}

TEST_CASE("regex selection matches a hand-written matcher") {
  std::mt19937_64 rng(5);
  SceneModel m;
  const NodeId root = m.add_node("root", std::nullopt);
  const std::string alphabet = "M0123456789mX_ ";
  for (int i = 0; i < 100; ++i) {
    std::string name;
    const int len = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int k = 0; k < len; ++k) name += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    if (i % 4 == 0) name = "M" + std::to_string(i);
    m.add_node(name, root);
  }
  std::set<NodeId> expected;
  for (const auto& [id, n] : m.nodes()) {
    if (oracle_m_digits(n.name)) expected.insert(id);
  }
  CHECK(expected.size() >= 25);
  CHECK(as_set(select_nodes(m, ByName{"^M[0-9]+$", true})) == expected);
}

TEST_CASE("removal takes whole subtrees and accounting is exact") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const SceneModel m = random_tree(rng, 30);
    const NodeId victim = std::next(m.nodes().begin(), 1 + trial % 29)->first;
    const auto r = apply_plan(m, plan_of({RemoveNodes{{victim}}}));
    for (NodeId id : m.subtree(victim)) CHECK_FALSE(r.model.has_node(id));
    CHECK(r.model.nodes().size() == m.nodes().size() - m.subtree(victim).size());
    CHECK(r.report.initial_triangles == total_triangles(m));
    CHECK(r.report.final_triangles == total_triangles(r.model));
    CHECK(r.report.initial_triangles - r.report.final_triangles == static_cast<std::uint64_t>(r.report.steps[0].triangle_delta));
    r.model.validate();
  }
}

TEST_CASE("empty plan leaves the model unchanged") {
  std::mt19937_64 rng(2);
  const SceneModel m = random_tree(rng, 15);
  const auto r = apply_plan(m, plan_of({}));
  CHECK(r.model.nodes().size() == m.nodes().size());
  CHECK(r.report.final_triangles == r.report.initial_triangles);
  CHECK(r.report.verdict == Verdict::kUnderIdeal);
}

TEST_CASE("step order matters for explicit ids") {
  SceneModel m;
  const NodeId root = m.add_node("root", std::nullopt);
  const NodeId cover = m.add_node("cover", root, {}, m.add_mesh(unit_cube()));
  const NodeId base = m.add_node("base", root, {}, m.add_mesh(unit_cube()));
  const SetColor red{std::vector<NodeId>{root, cover, base}, Vec3(1, 0, 0)};
  const RemoveByName drop{"cover", false};

  const auto forward = apply_plan(m, plan_of({red, drop}));
  CHECK_FALSE(forward.model.has_node(cover));
  CHECK(forward.model.node(base).style.color == Vec3(1, 0, 0));
  CHECK(plan_error_step(plan_of({drop, red}), &m) == 1u);

  const SetColor all{std::nullopt, Vec3(1, 0, 0)};
  const auto a = apply_plan(m, plan_of({all, drop}));
  const auto b = apply_plan(m, plan_of({drop, all}));
  CHECK(a.model.nodes().size() == b.model.nodes().size());
  CHECK(a.model.node(base).style == b.model.node(base).style);
  CHECK(plan_error_step(plan_of({RemoveNodes{{NodeId{99}}}}), &m) == 0u);
}

TEST_CASE("random plans never increase the triangle count") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const SceneModel m = random_tree(rng, 30);
    std::vector<ReductionStep> steps;
    const int count = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int i = 0; i < count; ++i) {
      switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
        case 0: steps.push_back(RemoveBySize{std::uniform_real_distribution<double>(0, 1.2)(rng)}); break;
        case 1: steps.push_back(RemoveByName{"n" + std::to_string(std::uniform_int_distribution<int>(1, 9)(rng)), false}); break;
        case 2: steps.push_back(SetColor{std::nullopt, Vec3(0.1, 0.2, 0.3)}); break;
        case 3: steps.push_back(SetOpacity{std::nullopt, 0.5}); break;
        case 4: steps.push_back(ApplyLod{std::nullopt, {0.5}, 1}); break;
        default: {
          const Vec3 c(std::uniform_real_distribution<double>(-1, 1)(rng), 0, 0);
          steps.push_back(BoxCut{OrientedBox{Aabb::from_min_max(c - Vec3::Constant(0.8), c + Vec3::Constant(0.8))},
                                 trial % 2 ? BoxMode::kKeep : BoxMode::kCut});
        }
      }
    }
    const auto r = apply_plan(m, plan_of(steps));
    CHECK(r.report.final_triangles <= r.report.initial_triangles);
    std::int64_t sum = 0;
    for (const auto& s : r.report.steps) {
      sum += s.triangle_delta;
      if (s.op.rfind("set_", 0) == 0) CHECK(s.triangle_delta == 0);
      CHECK(s.triangle_delta >= 0);
    }
    CHECK(static_cast<std::uint64_t>(sum) == r.report.initial_triangles - r.report.final_triangles);
    CHECK(r.report.final_triangles == total_triangles(r.model, LodPolicy::kPerNodeSelected));
    r.model.validate();
  }
}

TEST_CASE("apply_lod switches nodes to the requested level") {
  SceneModel m;
  const NodeId root = m.add_node("root", std::nullopt);
  const NodeId a = m.add_node("a", root, {}, m.add_mesh(uv_sphere(24, 16, 1.0)));
  const auto r = apply_plan(m, plan_of({ApplyLod{std::nullopt, {0.5, 0.25}, 5}}));
  CHECK(r.model.node(a).lod_level == 2);
  CHECK(r.model.mesh(*r.model.node(a).mesh).lod_count() == 3);
  CHECK(r.report.final_triangles == r.model.mesh(*r.model.node(a).mesh).triangle_count(2));
  CHECK(r.report.final_triangles < m.mesh(*m.node(a).mesh).triangle_count() / 3);
}

TEST_CASE("synthetic assembly reaches the ideal budget with size, name and LOD steps") {
  SyntheticAssemblySpec spec;
  spec.target_triangles = 350'000;
  const SceneModel m = synthetic_assembly(spec);
  REQUIRE(total_triangles(m) == 350'000);
  ReductionPlan p = plan_of({RemoveBySize{0.05}, RemoveByName{"washer", false}, ApplyLod{std::nullopt, {0.6}, 1}});
  p.ideal_budget = 200'000;
  p.hard_budget = 300'000;
  const auto r = apply_plan(m, p);
  CHECK(r.report.initial_triangles == 350'000);
  CHECK(r.report.final_triangles < 200'000);
  CHECK(r.report.verdict == Verdict::kUnderIdeal);
  std::int64_t sum = 0;
  for (const auto& s : r.report.steps) sum += s.triangle_delta;
  CHECK(static_cast<std::uint64_t>(sum) == r.report.initial_triangles - r.report.final_triangles);
  CHECK(r.report.final_triangles == total_triangles(r.model, LodPolicy::kPerNodeSelected));
}

TEST_CASE("box cut on a quad keeps the touched triangle") {
  SceneModel m;
  m.add_node("quad", std::nullopt, {}, m.add_mesh(quad()));
  const OrientedBox corner{Aabb::from_min_max(Vec3(0.7, -0.1, -0.1), Vec3(1.2, 0.2, 0.1))};
  const SceneModel kept = box_cut(m, corner, BoxMode::kKeep);
  CHECK(total_triangles(kept) == 1);
  CHECK(kept.mesh(*kept.node(*kept.root()).mesh).triangles()[0] == Triangle{0, 1, 2});
  CHECK(total_triangles(box_cut(m, corner, BoxMode::kCut)) == 1);

  const OrientedBox everything{Aabb::from_min_max(Vec3(-1, -1, -1), Vec3(2, 2, 1))};
  CHECK(total_triangles(box_cut(m, everything, BoxMode::kKeep)) == 2);
  std::vector<NodeId> removed;
  const SceneModel none = box_cut(m, everything, BoxMode::kCut, &removed);
  CHECK(none.empty());
  CHECK(removed.size() == 1);
}

TEST_CASE("box cut partitions triangles and matches a sampling oracle") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 25; ++trial) {
    const SceneModel m = random_tree(rng, 25);
    const Vec3 c(u(rng), u(rng), u(rng));
    const Vec3 h = Vec3(std::abs(u(rng)), std::abs(u(rng)), std::abs(u(rng))) + Vec3::Constant(0.05);
    std::normal_distribution<double> n;
    const OrientedBox box{Aabb::from_min_max(c - h, c + h), Quat(n(rng), n(rng), n(rng), n(rng)).normalized()};
    const SceneModel keep = box_cut(m, box, BoxMode::kKeep);
    const SceneModel cut = box_cut(m, box, BoxMode::kCut);
    CHECK(total_triangles(keep) + total_triangles(cut) == total_triangles(m));
    keep.validate();
    cut.validate();

    const Eigen::Matrix3d inv = box.rotation.conjugate().toRotationMatrix();
    const Vec3 center = box.box.center();
    std::size_t sampled_inside = 0;
    for (const auto& t : world_triangles(m)) {
      bool hit = false;
      for (int i = 0; i <= 6 && !hit; ++i) {
        for (int j = 0; i + j <= 6 && !hit; ++j) {
          const Vec3 p = t[0] + (t[1] - t[0]) * (i / 6.0) + (t[2] - t[0]) * (j / 6.0);
          const Vec3 q = inv * (p - center) + center;
          hit = (q.array() >= box.box.min.array()).all() && (q.array() <= box.box.max.array()).all();
        }
      }
      if (hit) {
        ++sampled_inside;
        CHECK(triangle_intersects_box(t[0], t[1], t[2], box));
      }
    }
    CHECK(total_triangles(keep) >= sampled_inside);
  }
}

TEST_CASE("visibility keeps a lone cube and rejects bad spheres") {
  SceneModel m;
  m.add_node("cube", std::nullopt, {}, m.add_mesh(unit_cube()));
  for (int n : {4, 16, 64}) CHECK(visibility_cull(m, Vec3::Zero(), 2.0, n).size() == 1);
  CHECK_THROWS_AS(visibility_cull(m, Vec3::Zero(), 0.5, 16), InvalidArgument);
  CHECK_THROWS_AS(visibility_cull(m, Vec3::Zero(), 2.0, 3), InvalidArgument);
  CHECK(plan_error_step(plan_of({VisibilityCull{Vec3(5, 0, 0), 1.0, 16}}), &m) == 0u);
}

TEST_CASE("camera layouts are nested and on the sphere") {
  const auto small = camera_layout(16);
  const auto large = camera_layout(64);
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i] == large[i]);
  for (const Vec3& d : large) CHECK(d.norm() == doctest::Approx(1.0));
  for (const auto& f : cube_faces(Vec3(0, 0, 5), Vec3::Zero(), 5.0)) {
    CHECK((f.pose.translation - Vec3(0, 0, 5)).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("a cube inside a closed cube is culled") {
  SceneModel m;
  const NodeId outer = m.add_node("outer", std::nullopt, {}, m.add_mesh(box_mesh(Vec3::Constant(1.0))));
  const NodeId inner = m.add_node("inner", outer, {}, m.add_mesh(box_mesh(Vec3::Constant(0.3))));
  const double radius = std::sqrt(3.0) * 1.01;
  const auto cams = camera_positions(Vec3::Zero(), radius, 64);
  const auto oracle = raycast_visible(m, cams);
  CHECK(oracle == std::set<NodeId>{outer});
  CHECK(as_set(visibility_cull(m, Vec3::Zero(), radius, 64)) == std::set<NodeId>{outer});

  const auto r = apply_plan(m, plan_of({VisibilityCull{Vec3::Zero(), radius, 64}}));
  CHECK(r.report.steps[0].removed == std::vector<NodeId>{inner});

  SceneModel glass = m;
  glass.mutable_node(outer).style.opacity = 0.5;
  CHECK(as_set(visibility_cull(glass, Vec3::Zero(), radius, 16)) == std::set<NodeId>{outer, inner});
}

TEST_CASE("visibility never drops a ray-cast visible node") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 6; ++trial) {
    const NestedBoxScene s = nested_box_scene(rng);
    const auto kept64 = as_set(visible_mesh_nodes(s.model, s.center, s.radius, 64));
    const auto kept16 = as_set(visible_mesh_nodes(s.model, s.center, s.radius, 16));
    for (NodeId id : raycast_visible(s.model, camera_positions(s.center, s.radius, 64))) CHECK(kept64.count(id) == 1);
    for (NodeId id : kept16) CHECK(kept64.count(id) == 1);
    for (NodeId id : s.enclosed) CHECK(kept64.count(id) == 0);
  }
}
