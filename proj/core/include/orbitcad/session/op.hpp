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
#include "orbitcad/scene/geometry.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace orbitcad::session {

using OpId = std::uint64_t;
using ClientId = std::string;
using SessionNodeId = std::uint32_t;

enum class NudgeAxis { kX, kY, kZ, kFree };
enum class ClientKind { kHeadset, kWeb };

struct SessionOp;
using OpList = std::vector<SessionOp>;

struct SetActiveModel {
  std::string model_id;
};
struct TransformWhole {
  Transform transform;
};
/// Replaces the node's session transform (applied on top of its model-local one).
struct TransformNode {
  SessionNodeId node = 0;
  Transform transform;
};
/// Composes a translation onto the whole model (no node) or one node. With a
/// single-axis constraint only that component of `delta` is used.
struct NudgeTransform {
  std::optional<SessionNodeId> node;
  NudgeAxis axis = NudgeAxis::kFree;
  Vec3 delta = Vec3::Zero();
};
/// Uniform whole-model scale, either arbitrary or a named preset.
struct SetScale {
  double factor = 1.0;
  std::string preset;
};
struct SetNodeVisibility {
  SessionNodeId node = 0;
  bool visible = true;
};
struct SetCutPlane {
  Axis axis = Axis::kX;
  double offset = 0.0;
  bool enabled = true;
};
struct PlacePoi {
  Vec3 position = Vec3::Zero();
  std::optional<SessionNodeId> anchor;
};
struct ClearPoi {};
/// `snapshot` is filled in when the slide is created (or carried by squashed
/// logs); an empty pointer means "capture the current state".
struct CreateSlide {
  std::string slide_id;
  std::string name;
  std::shared_ptr<const OpList> snapshot;
};
struct LoadSlide {
  std::string slide_id;
};
struct DeleteSlide {
  std::string slide_id;
};
struct ParticipantPose {
  Pose pose;
};
struct Join {
  std::string name;
  ClientKind kind = ClientKind::kWeb;
};
struct Leave {};

using OpPayload = std::variant<SetActiveModel, TransformWhole, TransformNode, NudgeTransform, SetScale,
                               SetNodeVisibility, SetCutPlane, PlacePoi, ClearPoi, CreateSlide,
                               LoadSlide, DeleteSlide, ParticipantPose, Join, Leave>;

struct SessionOp {
  OpId op_id = 0;
  ClientId client_id;
  std::int64_t wall_time = 0;  // milliseconds since the Unix epoch
  OpPayload payload;
};

/// Wire "type" string of a payload, e.g. "transform_node".
std::string_view op_type(const OpPayload& payload);
inline bool is_ephemeral(const SessionOp& op) {
  return std::holds_alternative<ParticipantPose>(op.payload);
}

/// Named scale presets ("full" 1, "half" 0.5, "tenth" 0.1, "hundredth" 0.01).
std::optional<double> scale_preset(std::string_view name);

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& message) : Error("protocol_error", message) {}
};

}  // namespace orbitcad::session
