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

#include "orbitcad/scene/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace orbitcad::render {

struct DrawCandidate {
  NodeId node{};
  std::uint64_t triangles = 0;
};

/// Successive frames of node batches under a per-frame triangle budget.
struct DrawPlan {
  std::uint64_t budget = 0;
  std::vector<std::vector<NodeId>> frames;
};

/// Sorts candidates by triangle count (largest first, ties by NodeId) and
/// packs them greedily into frames: a node that does not fit closes the
/// current frame. A node larger than the budget gets a frame of its own.
/// Throws InvalidArgument when `budget` is 0.
DrawPlan plan_iterative_draw(std::span<const DrawCandidate> nodes, std::uint64_t budget);

/// Candidates for every mesh-bearing node at its selected LOD.
std::vector<DrawCandidate> draw_candidates(const SceneModel& model);

}  // namespace orbitcad::render
