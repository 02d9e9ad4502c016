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

#include "orbitcad/reduction/plan.hpp"

#include "orbitcad/io/model_io.hpp"

#include <algorithm>
#include <set>

namespace orbitcad::reduction {

namespace {

std::uint64_t budget_triangles(const SceneModel& m) {
  return total_triangles(m, LodPolicy::kPerNodeSelected);
}

void require_nodes(const SceneModel& model, const std::vector<NodeId>& ids, std::size_t step) {
  for (NodeId id : ids) {
    if (!model.has_node(id)) {
      throw PlanError("node " + std::to_string(to_underlying(id)) + " does not exist in the model", step);
    }
  }
}

std::vector<NodeId> resolve(const SceneModel& model, const IdSelection& ids, std::size_t step) {
  if (!ids) {
    std::vector<NodeId> all;
    for (const auto& [id, n] : model.nodes()) all.push_back(id);
    return all;
  }
  require_nodes(model, *ids, step);
  return *ids;
}

std::vector<NodeId> remove_all(SceneModel& model, std::vector<NodeId> ids) {
  std::sort(ids.begin(), ids.end());
  std::vector<NodeId> removed;
  for (NodeId id : ids) {
    if (!model.has_node(id)) continue;
    auto r = model.remove_subtree(id);
    removed.insert(removed.end(), r.begin(), r.end());
  }
  model.prune_meshes();
  std::sort(removed.begin(), removed.end());
  return removed;
}

template <class F>
void style_each(SceneModel& model, const IdSelection& ids, std::size_t step, F&& f) {
  for (NodeId id : resolve(model, ids, step)) f(model.mutable_node(id).style);
}

std::vector<NodeId> apply_visibility(SceneModel& model, const VisibilityCull& s, std::size_t step) {
  std::vector<NodeId> visible;
  try {
    visible = visible_mesh_nodes(model, s.center, s.radius, s.camera_count);
  } catch (const InvalidArgument& e) {
    throw PlanError(e.what(), step);
  }
  const std::set<NodeId> seen(visible.begin(), visible.end());
  std::set<NodeId> keep;
  for (NodeId id : visible) {
    std::optional<NodeId> cur = id;
    while (cur && keep.insert(*cur).second) cur = model.node(*cur).parent;
  }
  std::vector<NodeId> drop;
  for (const auto& [id, n] : model.nodes()) {
    if (!keep.count(id)) drop.push_back(id);
  }
  // Ancestors kept only for structure lose their own unseen mesh.
  for (NodeId id : keep) {
    SceneNode& n = model.mutable_node(id);
    if (n.mesh && !seen.count(id)) {
      n.mesh.reset();
      n.lod_level = 0;
    }
  }
  return remove_all(model, drop);
}

void apply_lod(SceneModel& model, const ApplyLod& s, std::size_t step) {
  std::set<MeshId> meshes;
  std::vector<NodeId> targets;
  for (NodeId id : resolve(model, s.ids, step)) {
    const SceneNode& n = model.node(id);
    if (!n.mesh) continue;
    meshes.insert(*n.mesh);
    targets.push_back(id);
  }
  for (MeshId m : meshes) {
    model.replace_mesh(m, std::make_shared<const Mesh>(io::generate_lods(model.mesh(m), s.ratios)));
  }
  for (NodeId id : targets) {
    SceneNode& n = model.mutable_node(id);
    auto last = static_cast<std::uint32_t>(model.mesh(*n.mesh).lod_count() - 1);
    n.lod_level = std::min(s.level, last);
  }
}

}  // namespace

ReductionResult apply_plan(const SceneModel& input, const ReductionPlan& plan) {
  validate_plan(plan);
  ReductionResult result{input, {}};
  SceneModel& model = result.model;
  ReductionReport& report = result.report;
  report.initial_triangles = budget_triangles(model);

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const ReductionStep& step = plan.steps[i];
    StepReport sr;
    sr.index = i;
    sr.op = std::string(step_name(step));
    const std::uint64_t before = budget_triangles(model);
    if (const auto* s = std::get_if<RemoveNodes>(&step)) {
      require_nodes(model, s->ids, i);
      sr.removed = remove_all(model, s->ids);
    } else if (const auto* s = std::get_if<RemoveBySize>(&step)) {
      sr.removed = remove_all(model, select_nodes(model, BySize{s->threshold}));
    } else if (const auto* s = std::get_if<RemoveByName>(&step)) {
      sr.removed = remove_all(model, select_nodes(model, ByName{s->pattern, s->is_regex}));
    } else if (const auto* s = std::get_if<RemoveByType>(&step)) {
      sr.removed = remove_all(model, select_nodes(model, ByType{s->type}));
    } else if (const auto* s = std::get_if<VisibilityCull>(&step)) {
      sr.removed = apply_visibility(model, *s, i);
    } else if (const auto* s = std::get_if<BoxCut>(&step)) {
      model = box_cut(model, s->box, s->mode, &sr.removed);
    } else if (const auto* s = std::get_if<SetColor>(&step)) {
      style_each(model, s->ids, i, [&](RenderStyle& st) { st.color = s->rgb; });
    } else if (const auto* s = std::get_if<SetOpacity>(&step)) {
      style_each(model, s->ids, i, [&](RenderStyle& st) { st.opacity = s->value; });
    } else if (const auto* s = std::get_if<SetOcclusionOnly>(&step)) {
      style_each(model, s->ids, i, [&](RenderStyle& st) { st.occlusion_only = s->flag; });
    } else if (const auto* s = std::get_if<ApplyLod>(&step)) {
      apply_lod(model, *s, i);
    }
    const std::uint64_t after = budget_triangles(model);
    sr.triangle_delta = static_cast<std::int64_t>(before) - static_cast<std::int64_t>(after);
    report.steps.push_back(std::move(sr));
  }
  report.final_triangles = budget_triangles(model);
  report.verdict = budget_verdict(report.final_triangles, plan.ideal_budget, plan.hard_budget);
  return result;
}

}  // namespace orbitcad::reduction
