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

#include "orbitcad/error.hpp"
#include "orbitcad/scene/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace orbitcad::reduction {

/// Explicit node list, or every node in the model when empty-optional ("*").
using IdSelection = std::optional<std::vector<NodeId>>;

struct RemoveNodes {
  std::vector<NodeId> ids;
};
struct RemoveBySize {
  double threshold = 0.0;  // meters, world-bounds diagonal
};
struct RemoveByName {
  std::string pattern;
  bool is_regex = false;
};
struct RemoveByType {
  std::string type;
};
struct VisibilityCull {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  int camera_count = 64;
};

enum class BoxMode { kKeep, kCut };

/// Box given by its bounds in a frame rotated by `rotation` about the
/// bounds center.
struct OrientedBox {
  Aabb box;
  Quat rotation = Quat::Identity();
};

struct BoxCut {
  OrientedBox box;
  BoxMode mode = BoxMode::kKeep;
};
struct SetColor {
  IdSelection ids;
  Vec3 rgb = Vec3::Ones();
};
struct SetOpacity {
  IdSelection ids;
  double value = 1.0;
};
struct SetOcclusionOnly {
  IdSelection ids;
  bool flag = true;
};
/// Builds LOD chains for the selected nodes' meshes and switches the nodes
/// to `level` (clamped to the generated chain).
struct ApplyLod {
  IdSelection ids;
  std::vector<double> ratios;
  std::uint32_t level = 1;
};

using ReductionStep = std::variant<RemoveNodes, RemoveBySize, RemoveByName, RemoveByType,
                                   VisibilityCull, BoxCut, SetColor, SetOpacity,
                                   SetOcclusionOnly, ApplyLod>;

std::string_view step_name(const ReductionStep& step);

inline constexpr std::uint64_t kDefaultIdealBudget = 2'000'000;
inline constexpr std::uint64_t kDefaultHardBudget = 3'000'000;

struct ReductionPlan {
  std::string model_id;
  std::vector<ReductionStep> steps;
  std::uint64_t ideal_budget = kDefaultIdealBudget;
  std::uint64_t hard_budget = kDefaultHardBudget;
};

/// Plan rejected at build or apply time. `step_index` is the offending step
/// when the problem is local to one step.
class PlanError : public Error {
 public:
  PlanError(const std::string& message, std::optional<std::size_t> step_index)
      : Error("plan_error", step_index ? "step " + std::to_string(*step_index) + ": " + message : message),
        step_index_(step_index) {}
  std::optional<std::size_t> step_index() const { return step_index_; }

 private:
  std::optional<std::size_t> step_index_;
};

/// Checks parameter ranges; throws PlanError naming the step.
void validate_plan(const ReductionPlan& plan);

/// JSON plan document (schema in docs/reduction-plan.md). Parsing validates.
ReductionPlan plan_from_json(std::string_view json);
std::string plan_to_json(const ReductionPlan& plan);

enum class Verdict { kUnderIdeal, kUnderHard, kOver };
std::string_view verdict_name(Verdict v);
/// At or below the ideal budget is under_ideal; at or below hard is under_hard.
Verdict budget_verdict(std::uint64_t triangles, std::uint64_t ideal, std::uint64_t hard);

struct StepReport {
  std::size_t index = 0;
  std::string op;
  std::vector<NodeId> removed;
  /// Triangles before the step minus triangles after (selected LODs).
  std::int64_t triangle_delta = 0;
};

struct ReductionReport {
  std::uint64_t initial_triangles = 0;
  std::uint64_t final_triangles = 0;
  std::vector<StepReport> steps;
  Verdict verdict = Verdict::kUnderIdeal;
};

std::string report_to_json(const ReductionReport& report);

struct ReductionResult {
  SceneModel model;
  ReductionReport report;
};

/// Applies the steps in order to a copy of `model`. Triangle totals use each
/// node's selected LOD. Throws PlanError when a step names a node that does
/// not exist (or was removed by an earlier step).
ReductionResult apply_plan(const SceneModel& model, const ReductionPlan& plan);

// Individual operations, usable on their own.

struct BySize {
  double threshold = 0.0;
};
struct ByName {
  std::string pattern;
  bool is_regex = false;
};
struct ByType {
  std::string type;
};
using Selector = std::variant<BySize, ByName, ByType>;

/// by_size: the node's own mesh world-bounds diagonal < threshold (meshless
/// nodes never match). by_name: case-sensitive substring, or ECMAScript
/// regex search. by_type: exact node_type match. Throws InvalidArgument on
/// a bad regex.
std::vector<NodeId> select_nodes(const SceneModel& model, const Selector& selector);

/// Deterministic, prefix-nested camera directions on the unit sphere:
/// layout(n) is the first n points of layout(m) for every m >= n.
std::vector<Vec3> camera_layout(int camera_count);

struct VisibilityOptions {
  int resolution = 256;
};

/// Nodes with at least one fragment surviving the depth test in some view of
/// some camera, plus all their ancestors. Each camera sits on the sphere and
/// renders five 90-degree faces of a cube map whose front face looks at the
/// center. Nodes with opacity < 1 do not occlude. Throws InvalidArgument when
/// the sphere does not enclose the model or camera_count < 4.
std::vector<NodeId> visibility_cull(const SceneModel& model, const Vec3& center, double radius,
                                    int camera_count, const VisibilityOptions& options = {});
/// The mesh-bearing nodes seen by at least one camera, without ancestors.
std::vector<NodeId> visible_mesh_nodes(const SceneModel& model, const Vec3& center, double radius,
                                       int camera_count, const VisibilityOptions& options = {});

struct CubeFace {
  Pose pose;  // camera-to-world, looks down -Z
  double near_plane = 0.0;
  double far_plane = 0.0;
};

/// The five 90-degree views rendered from one visibility-cull camera
/// (exposed for oracles).
std::vector<CubeFace> cube_faces(const Vec3& position, const Vec3& center, double radius);

/// Triangle/oriented-box overlap, closed box (touching counts).
bool triangle_intersects_box(const Vec3& a, const Vec3& b, const Vec3& c, const OrientedBox& box);

/// Keeps (or cuts) whole triangles intersecting the box. Changed meshes lose
/// their lower LODs. Nodes emptied of triangles are removed, or keep their
/// place without a mesh when a descendant still has geometry. Returns the
/// removed node ids through `removed` when non-null.
SceneModel box_cut(const SceneModel& model, const OrientedBox& box, BoxMode mode,
                   std::vector<NodeId>* removed = nullptr);

}  // namespace orbitcad::reduction
