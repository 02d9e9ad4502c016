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

#include "orbitcad/render/draw_plan.hpp"

#include "orbitcad/error.hpp"

#include <algorithm>

namespace orbitcad::render {

DrawPlan plan_iterative_draw(std::span<const DrawCandidate> nodes, std::uint64_t budget) {
  if (budget == 0) throw InvalidArgument("draw budget must be at least 1 triangle");
  std::vector<DrawCandidate> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end(), [](const DrawCandidate& a, const DrawCandidate& b) {
    if (a.triangles != b.triangles) return a.triangles > b.triangles;
    return a.node < b.node;
  });

  DrawPlan plan;
  plan.budget = budget;
  std::uint64_t used = 0;
  for (const DrawCandidate& c : sorted) {
    bool open = !plan.frames.empty() && !plan.frames.back().empty();
    if (!open || used + c.triangles > budget) {
      plan.frames.emplace_back();
      used = 0;
    }
    plan.frames.back().push_back(c.node);
    used += c.triangles;
  }
  return plan;
}

std::vector<DrawCandidate> draw_candidates(const SceneModel& model) {
  std::vector<DrawCandidate> out;
  for (const auto& [id, node] : model.nodes()) {
    if (!node.mesh) continue;
    out.push_back({id, node_triangles(model, id, LodPolicy::kPerNodeSelected)});
  }
  return out;
}

}  // namespace orbitcad::render
