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

#include "orbitcad/session/op.hpp"

namespace orbitcad::session {

std::string_view op_type(const OpPayload& payload) {
  static constexpr std::string_view kNames[] = {
      "set_active_model", "transform_whole", "transform_node", "nudge_transform", "set_scale",
      "set_node_visibility", "set_cut_plane", "place_poi", "clear_poi", "create_slide",
      "load_slide", "delete_slide", "participant_pose", "join", "leave"};
  return kNames[payload.index()];
}

std::optional<double> scale_preset(std::string_view name) {
  if (name == "full") return 1.0;
  if (name == "half") return 0.5;
  if (name == "tenth") return 0.1;
  if (name == "hundredth") return 0.01;
  return std::nullopt;
}

}  // namespace orbitcad::session
