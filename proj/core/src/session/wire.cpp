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

#include "orbitcad/session/wire.hpp"

namespace orbitcad::session {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json quat(const Quat& q) { return json::array({q.x(), q.y(), q.z(), q.w()}); }

Vec3 get_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ProtocolError("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}
Quat get_quat(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ProtocolError("expected quaternion [x, y, z, w]");
  return Quat(j[3].get<double>(), j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json transform(const Transform& t) {
  return {{"translation", vec(t.translation)}, {"rotation", quat(t.rotation)}, {"scale", vec(t.scale)}};
}
Transform get_transform(const json& j) {
  Transform t;
  t.translation = get_vec(j.at("translation"));
  t.rotation = get_quat(j.at("rotation"));
  t.scale = j.contains("scale") ? get_vec(j["scale"]) : Vec3::Ones();
  if (std::abs(t.rotation.norm() - 1.0) > 1e-6) throw ProtocolError("rotation is not a unit quaternion");
  if (!(t.scale.array() > 0).all()) throw ProtocolError("scale must be positive");
  return t;
}

std::string axis_name(Axis a) { return std::string(1, "xyz"[static_cast<int>(a)]); }
Axis get_axis(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "x") return Axis::kX;
  if (s == "y") return Axis::kY;
  if (s == "z") return Axis::kZ;
  throw ProtocolError("axis must be x, y or z");
}

json body_of(const OpPayload& p) {
  json b = json::object();
  std::visit(Overloaded{
                 [&](const SetActiveModel& x) { b["model_id"] = x.model_id; },
                 [&](const TransformWhole& x) { b["transform"] = transform(x.transform); },
                 [&](const TransformNode& x) {
                   b["node"] = x.node;
                   b["transform"] = transform(x.transform);
                 },
                 [&](const NudgeTransform& x) {
                   b["target"] = x.node ? json(*x.node) : json("whole");
                   static constexpr const char* kAxes[] = {"x", "y", "z", "free"};
                   b["axis"] = kAxes[static_cast<int>(x.axis)];
                   b["delta"] = vec(x.delta);
                 },
                 [&](const SetScale& x) {
                   if (x.preset.empty()) {
                     b["factor"] = x.factor;
                   } else {
                     b["preset"] = x.preset;
                   }
                 },
                 [&](const SetNodeVisibility& x) {
                   b["node"] = x.node;
                   b["visible"] = x.visible;
                 },
                 [&](const SetCutPlane& x) {
                   b["axis"] = axis_name(x.axis);
                   b["offset"] = x.offset;
                   b["enabled"] = x.enabled;
                 },
                 [&](const PlacePoi& x) {
                   b["position"] = vec(x.position);
                   if (x.anchor) b["anchor"] = *x.anchor;
                 },
                 [&](const ClearPoi&) {},
                 [&](const CreateSlide& x) {
                   b["slide_id"] = x.slide_id;
                   b["name"] = x.name;
                   if (x.snapshot) b["ops"] = ops_to_json(*x.snapshot);
                 },
                 [&](const LoadSlide& x) { b["slide_id"] = x.slide_id; },
                 [&](const DeleteSlide& x) { b["slide_id"] = x.slide_id; },
                 [&](const ParticipantPose& x) {
                   b["pose"] = {{"rotation", quat(x.pose.rotation)}, {"translation", vec(x.pose.translation)}};
                 },
                 [&](const Join& x) {
                   b["name"] = x.name;
                   b["kind"] = x.kind == ClientKind::kHeadset ? "headset" : "web";
                 },
                 [&](const Leave&) {},
             },
             p);
  return b;
}

OpPayload payload_of(const std::string& type, const json& b) {
  if (type == "set_active_model") return SetActiveModel{b.at("model_id").get<std::string>()};
  if (type == "transform_whole") return TransformWhole{get_transform(b.at("transform"))};
  if (type == "transform_node") return TransformNode{b.at("node").get<SessionNodeId>(), get_transform(b.at("transform"))};
  if (type == "nudge_transform") {
    NudgeTransform x;
    const json& target = b.at("target");
    if (target.is_string()) {
      if (target.get<std::string>() != "whole") throw ProtocolError("nudge target must be \"whole\" or a node id");
    } else {
      x.node = target.get<SessionNodeId>();
    }
    const std::string axis = b.value("axis", "free");
    if (axis == "x") {
      x.axis = NudgeAxis::kX;
    } else if (axis == "y") {
      x.axis = NudgeAxis::kY;
    } else if (axis == "z") {
      x.axis = NudgeAxis::kZ;
    } else if (axis == "free") {
      x.axis = NudgeAxis::kFree;
    } else {
      throw ProtocolError("nudge axis must be x, y, z or free");
    }
    x.delta = get_vec(b.at("delta"));
    return x;
  }
  if (type == "set_scale") {
    SetScale x;
    if (b.contains("preset")) {
      x.preset = b["preset"].get<std::string>();
      if (!scale_preset(x.preset)) throw ProtocolError("unknown scale preset '" + x.preset + "'");
    } else {
      x.factor = b.at("factor").get<double>();
      if (!(x.factor > 0)) throw ProtocolError("scale factor must be positive");
    }
    return x;
  }
  if (type == "set_node_visibility") return SetNodeVisibility{b.at("node").get<SessionNodeId>(), b.at("visible").get<bool>()};
  if (type == "set_cut_plane") {
    return SetCutPlane{get_axis(b.at("axis")), b.value("offset", 0.0), b.value("enabled", true)};
  }
  if (type == "place_poi") {
    PlacePoi x;
    x.position = get_vec(b.at("position"));
    if (b.contains("anchor") && !b["anchor"].is_null()) x.anchor = b["anchor"].get<SessionNodeId>();
    return x;
  }
  if (type == "clear_poi") return ClearPoi{};
  if (type == "create_slide") {
    CreateSlide x;
    x.slide_id = b.value("slide_id", "");
    x.name = b.value("name", "");
    if (b.contains("ops")) x.snapshot = std::make_shared<const OpList>(ops_from_json(b["ops"]));
    return x;
  }
  if (type == "load_slide") return LoadSlide{b.at("slide_id").get<std::string>()};
  if (type == "delete_slide") return DeleteSlide{b.at("slide_id").get<std::string>()};
  if (type == "participant_pose") {
    const json& p = b.at("pose");
    Pose pose;
    pose.rotation = get_quat(p.at("rotation"));
    pose.translation = get_vec(p.at("translation"));
    return ParticipantPose{pose};
  }
  if (type == "join") {
    const std::string kind = b.value("kind", "web");
    if (kind != "web" && kind != "headset") throw ProtocolError("join kind must be web or headset");
    return Join{b.value("name", ""), kind == "headset" ? ClientKind::kHeadset : ClientKind::kWeb};
  }
  if (type == "leave") return Leave{};
  throw ProtocolError("unknown op type '" + type + "'");
}

}  // namespace

json op_to_json(const SessionOp& op) {
  return {{"v", kWireVersion}, {"op", op.op_id},   {"cid", op.client_id},
          {"t", op.wall_time},  {"type", op_type(op.payload)}, {"body", body_of(op.payload)}};
}

SessionOp op_from_json(const json& j) {
  if (!j.is_object()) throw ProtocolError("op frame must be a JSON object");
  try {
    if (j.value("v", 0) != kWireVersion) throw ProtocolError("unsupported wire version");
    SessionOp op;
    op.op_id = j.value("op", OpId{0});
    op.client_id = j.value("cid", "");
    op.wall_time = j.value("t", std::int64_t{0});
    if (!j.contains("type") || !j["type"].is_string()) throw ProtocolError("op frame lacks a type");
    op.payload = payload_of(j["type"].get<std::string>(), j.value("body", json::object()));
    return op;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed op frame: ") + e.what());
  }
}

std::string encode_op(const SessionOp& op) { return op_to_json(op).dump(); }

SessionOp decode_op(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("frame is not valid JSON");
  return op_from_json(j);
}

json ops_to_json(const OpList& ops) {
  json a = json::array();
  for (const SessionOp& op : ops) a.push_back(op_to_json(op));
  return a;
}

OpList ops_from_json(const json& j) {
  if (!j.is_array()) throw ProtocolError("expected an array of ops");
  OpList out;
  out.reserve(j.size());
  for (const json& e : j) out.push_back(op_from_json(e));
  return out;
}

std::string encode_sync(OpId watermark, const OpList& ops, std::string_view cid) {
  json j{{"v", kWireVersion}, {"frame", "sync"}, {"watermark", watermark}, {"ops", ops_to_json(ops)}};
  if (!cid.empty()) j["cid"] = cid;
  return j.dump();
}

std::string encode_error(std::string_view code, std::string_view message) {
  return json{{"v", kWireVersion}, {"frame", "error"}, {"code", code}, {"message", message}}.dump();
}

ServerFrame decode_server_frame(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ProtocolError("frame is not a JSON object");
  ServerFrame f;
  if (!j.contains("frame")) {
    f.kind = FrameKind::kOp;
    f.op = op_from_json(j);
    return f;
  }
  try {
    const std::string kind = j["frame"].get<std::string>();
    if (kind == "sync") {
      f.kind = FrameKind::kSync;
      f.watermark = j.at("watermark").get<OpId>();
      f.ops = ops_from_json(j.at("ops"));
      f.cid = j.value("cid", "");
    } else if (kind == "error") {
      f.kind = FrameKind::kError;
      f.code = j.value("code", "");
      f.message = j.value("message", "");
    } else {
      throw ProtocolError("unknown frame kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed frame: ") + e.what());
  }
  return f;
}

}  // namespace orbitcad::session
