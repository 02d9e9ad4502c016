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

#include "orbitcad/session/state.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>

namespace orbitcad::session {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string node_str(SessionNodeId n) { return std::to_string(n); }

Vec3 constrain(NudgeAxis axis, const Vec3& d) {
  switch (axis) {
    case NudgeAxis::kX: return {d.x(), 0, 0};
    case NudgeAxis::kY: return {0, d.y(), 0};
    case NudgeAxis::kZ: return {0, 0, d.z()};
    case NudgeAxis::kFree: return d;
  }
  return d;
}

bool stale(const SessionState& s, const ApplyContext* ctx, SessionNodeId node) {
  return ctx && ctx->node_exists && !ctx->node_exists(s.active_model, node);
}

}  // namespace

ApplyOutcome apply_op(SessionState& s, const SessionOp& op, const ApplyContext* ctx) {
  const bool ephemeral = is_ephemeral(op);
  if (ephemeral ? op.op_id < s.last_op_id : op.op_id <= s.last_op_id) {
    throw ProtocolError("op " + std::to_string(op.op_id) + " is not after op " + std::to_string(s.last_op_id));
  }
  s.last_op_id = op.op_id;
  const Stamp stamp{op.client_id, op.wall_time};
  ApplyOutcome out;
  auto stale_node = [&](SessionNodeId n) {
    if (!stale(s, ctx, n)) return false;
    out.warning = "node " + node_str(n) + " is not part of model '" + s.active_model + "'";
    return true;
  };

  std::visit(
      Overloaded{
          [&](const SetActiveModel& p) {
            s.active_model = p.model_id;
            s.active_model_stamp = stamp;
            s.node_transforms.clear();
            s.node_visibility.clear();
          },
          [&](const TransformWhole& p) {
            Transform t = p.transform;
            s.whole_transform = t.normalize();
            s.whole_stamp = stamp;
          },
          [&](const TransformNode& p) {
            if (stale_node(p.node)) return;
            Transform t = p.transform;
            s.node_transforms[p.node] = {t.normalize(), stamp};
          },
          [&](const NudgeTransform& p) {
            const Vec3 d = constrain(p.axis, p.delta);
            if (!p.node) {
              Transform t = s.whole();
              t.translation += d;
              s.whole_transform = t;
              s.whole_stamp = stamp;
              return;
            }
            if (stale_node(*p.node)) return;
            auto it = s.node_transforms.find(*p.node);
            Transform t = it == s.node_transforms.end() ? Transform{} : it->second.value;
            t.translation += d;
            s.node_transforms[*p.node] = {t, stamp};
          },
          [&](const SetScale& p) {
            double f = p.factor;
            if (!p.preset.empty()) {
              auto preset = scale_preset(p.preset);
              if (!preset) {
                out.warning = "unknown scale preset '" + p.preset + "'";
                return;
              }
              f = *preset;
            }
            if (!(f > 0) || !std::isfinite(f)) {
              out.warning = "scale factor must be positive";
              return;
            }
            Transform t = s.whole();
            t.scale = Vec3::Constant(f);
            s.whole_transform = t;
            s.whole_stamp = stamp;
          },
          [&](const SetNodeVisibility& p) {
            if (stale_node(p.node)) return;
            s.node_visibility[p.node] = {p.visible, stamp};
          },
          [&](const SetCutPlane& p) {
            if (p.enabled) {
              s.cut_plane = CutPlaneState{p.axis, p.offset};
            } else {
              s.cut_plane.reset();
            }
            s.cut_stamp = stamp;
          },
          [&](const PlacePoi& p) {
            s.poi = PoiState{p.position, op.client_id, p.anchor};
            s.poi_stamp = stamp;
          },
          [&](const ClearPoi&) {
            s.poi.reset();
            s.poi_stamp = stamp;
          },
          [&](const CreateSlide& p) {
            if (p.snapshot) {
              s.slides[p.slide_id] = Slide{p.slide_id, p.name, p.snapshot, stamp};
            } else {
              create_slide(s, p.slide_id, p.name, stamp);
            }
          },
          [&](const LoadSlide& p) {
            if (!s.slides.count(p.slide_id)) {
              out.warning = "unknown slide '" + p.slide_id + "'";
              return;
            }
            load_slide(s, p.slide_id);
          },
          [&](const DeleteSlide& p) {
            if (s.slides.erase(p.slide_id) == 0) out.warning = "unknown slide '" + p.slide_id + "'";
          },
          [&](const ParticipantPose& p) {
            Participant& part = s.participants[op.client_id];
            part.pose = p.pose;
            part.pose_time = op.wall_time;
          },
          [&](const Join& p) {
            Participant& part = s.participants[op.client_id];
            part.name = p.name;
            part.kind = p.kind;
          },
          [&](const Leave&) { s.participants.erase(op.client_id); },
      },
      op.payload);
  return out;
}

SessionState apply(SessionState state, const SessionOp& op) {
  apply_op(state, op);
  return state;
}

SessionState fold(const OpList& log) {
  SessionState s;
  for (const SessionOp& op : log) apply_op(s, op);
  return s;
}

OpList state_to_ops(const SessionState& s, bool include_slides) {
  OpList ops;
  auto push = [&](const Stamp& st, OpPayload p) {
    ops.push_back(SessionOp{static_cast<OpId>(ops.size() + 1), st.cid, st.t, std::move(p)});
  };
  if (!s.active_model.empty()) push(s.active_model_stamp, SetActiveModel{s.active_model});
  if (s.whole_transform) push(s.whole_stamp, TransformWhole{*s.whole_transform});
  if (s.cut_plane) push(s.cut_stamp, SetCutPlane{s.cut_plane->axis, s.cut_plane->offset, true});
  if (s.poi) push(s.poi_stamp, PlacePoi{s.poi->position, s.poi->anchor});
  auto ti = s.node_transforms.begin();
  auto vi = s.node_visibility.begin();
  while (ti != s.node_transforms.end() || vi != s.node_visibility.end()) {
    SessionNodeId n;
    if (vi == s.node_visibility.end() || (ti != s.node_transforms.end() && ti->first <= vi->first)) {
      n = ti->first;
    } else {
      n = vi->first;
    }
    if (ti != s.node_transforms.end() && ti->first == n) {
      push(ti->second.stamp, TransformNode{n, ti->second.value});
      ++ti;
    }
    if (vi != s.node_visibility.end() && vi->first == n) {
      push(vi->second.stamp, SetNodeVisibility{n, vi->second.value});
      ++vi;
    }
  }
  if (include_slides) {
    for (const auto& [id, slide] : s.slides) {
      push(slide.stamp, CreateSlide{slide.slide_id, slide.name, slide.ops});
    }
  }
  return ops;
}

void create_slide(SessionState& s, const std::string& slide_id, const std::string& name,
                  const Stamp& stamp) {
  s.slides[slide_id] = Slide{slide_id, name, std::make_shared<const OpList>(state_to_ops(s, false)), stamp};
}

void load_slide(SessionState& s, const std::string& slide_id) {
  auto it = s.slides.find(slide_id);
  if (it == s.slides.end()) throw Error("unknown_slide", "unknown slide '" + slide_id + "'");
  SessionState snap;
  for (const SessionOp& op : *it->second.ops) apply_op(snap, op);
  s.active_model = std::move(snap.active_model);
  s.active_model_stamp = std::move(snap.active_model_stamp);
  s.whole_transform = snap.whole_transform;
  s.whole_stamp = std::move(snap.whole_stamp);
  s.node_transforms = std::move(snap.node_transforms);
  s.node_visibility = std::move(snap.node_visibility);
  s.cut_plane = snap.cut_plane;
  s.cut_stamp = std::move(snap.cut_stamp);
  s.poi = std::move(snap.poi);
  s.poi_stamp = std::move(snap.poi_stamp);
}

namespace {

class Canon {
 public:
  std::string out;

  void num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    std::string_view s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string_view::npos) s.remove_prefix(1);
    out += s;
  }
  void str(const std::string& s) { out += nlohmann::json(s).dump(); }
  void key(const char* k) {
    str(k);
    out += ':';
  }
  void vec(const Vec3& v) {
    out += '[';
    num(v.x()), out += ',', num(v.y()), out += ',', num(v.z());
    out += ']';
  }
  void quat(const Quat& q) {
    out += '[';
    num(q.x()), out += ',', num(q.y()), out += ',', num(q.z()), out += ',', num(q.w());
    out += ']';
  }
  void transform(const Transform& t) {
    out += '{';
    key("rotation"), quat(t.rotation), out += ',';
    key("scale"), vec(t.scale), out += ',';
    key("translation"), vec(t.translation);
    out += '}';
  }
  void pose(const Pose& p) {
    out += '{';
    key("rotation"), quat(p.rotation), out += ',';
    key("translation"), vec(p.translation);
    out += '}';
  }

  // Keys in string order, as a JSON object requires for byte comparison.
  template <class Map, class F>
  void object(const Map& m, F&& value) {
    std::map<std::string, const typename Map::mapped_type*> sorted;
    for (const auto& [k, v] : m) {
      if constexpr (std::is_same_v<typename Map::key_type, std::string>) {
        sorted.emplace(k, &v);
      } else {
        sorted.emplace(std::to_string(k), &v);
      }
    }
    out += '{';
    bool first = true;
    for (const auto& [k, v] : sorted) {
      if (!first) out += ',';
      first = false;
      str(k);
      out += ':';
      value(*v);
    }
    out += '}';
  }

  void state(const SessionState& s, const CanonicalOptions& o, bool slides) {
    out += '{';
    key("active_model"), str(s.active_model), out += ',';
    key("cut_plane");
    if (s.cut_plane) {
      out += '{';
      key("axis"), str(std::string(1, "xyz"[static_cast<int>(s.cut_plane->axis)])), out += ',';
      key("offset"), num(s.cut_plane->offset);
      out += '}';
    } else {
      out += "null";
    }
    out += ',';
    if (o.include_last_op) key("last_op_id"), out += std::to_string(s.last_op_id), out += ',';
    key("node_transforms"), object(s.node_transforms, [&](const auto& v) { transform(v.value); });
    out += ',';
    key("node_visibility"), object(s.node_visibility, [&](const auto& v) { out += v.value ? "true" : "false"; });
    out += ',';
    if (o.include_participants) {
      key("participants");
      object(s.participants, [&](const Participant& p) {
        out += '{';
        key("kind"), str(p.kind == ClientKind::kHeadset ? "headset" : "web"), out += ',';
        key("name"), str(p.name), out += ',';
        key("pose");
        if (p.pose) {
          pose(*p.pose);
        } else {
          out += "null";
        }
        out += '}';
      });
      out += ',';
    }
    key("poi");
    if (s.poi) {
      out += '{';
      key("anchor");
      if (s.poi->anchor) {
        out += std::to_string(*s.poi->anchor);
      } else {
        out += "null";
      }
      out += ',';
      key("placer"), str(s.poi->placer), out += ',';
      key("position"), vec(s.poi->position);
      out += '}';
    } else {
      out += "null";
    }
    if (slides) {
      out += ',';
      key("slides");
      object(s.slides, [&](const Slide& sl) {
        SessionState snap;
        for (const SessionOp& op : *sl.ops) apply_op(snap, op);
        out += '{';
        key("name"), str(sl.name), out += ',';
        key("state"), state(snap, {}, false);
        out += '}';
      });
    }
    out += ',';
    key("whole_transform");
    if (s.whole_transform) {
      transform(*s.whole_transform);
    } else {
      out += "null";
    }
    out += '}';
  }
};

}  // namespace

std::string canonical_serialize(const SessionState& state, const CanonicalOptions& options) {
  Canon c;
  c.state(state, options, true);
  return std::move(c.out);
}

std::string state_hash(const SessionState& state) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical_serialize(state)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace orbitcad::session
