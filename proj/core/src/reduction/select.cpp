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

#include <regex>

namespace orbitcad::reduction {

std::vector<NodeId> select_nodes(const SceneModel& model, const Selector& selector) {
  std::vector<NodeId> out;
  if (const auto* s = std::get_if<BySize>(&selector)) {
    for (const auto& [id, box] : own_mesh_world_bounds(model)) {
      if (model.node(id).mesh && !box.is_empty() && box.diagonal() < s->threshold) out.push_back(id);
    }
    return out;
  }
  if (const auto* s = std::get_if<ByName>(&selector)) {
    if (s->is_regex) {
      std::regex re;
      try {
        re = std::regex(s->pattern, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw InvalidArgument("invalid regular expression '" + s->pattern + "': " + e.what());
      }
      for (const auto& [id, node] : model.nodes()) {
        if (std::regex_search(node.name, re)) out.push_back(id);
      }
    } else {
      for (const auto& [id, node] : model.nodes()) {
        if (node.name.find(s->pattern) != std::string::npos) out.push_back(id);
      }
    }
    return out;
  }
  const auto& type = std::get<ByType>(selector).type;
  for (const auto& [id, node] : model.nodes()) {
    if (node.node_type == type) out.push_back(id);
  }
  return out;
}

}  // namespace orbitcad::reduction
