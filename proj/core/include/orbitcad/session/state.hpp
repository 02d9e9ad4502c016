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

#include "orbitcad/session/op.hpp"

#include <functional>
#include <map>

namespace orbitcad::session {

/// Who last set a state dimension; squashed ops carry it so that squashing
/// a squashed log reproduces it exactly.
struct Stamp {
  ClientId cid;
  std::int64_t t = 0;
  friend bool operator==(const Stamp&, const Stamp&) = default;
};

struct CutPlaneState {
  Axis axis = Axis::kX;
  double offset = 0.0;
};

struct PoiState {
  Vec3 position = Vec3::Zero();
  ClientId placer;
  std::optional<SessionNodeId> anchor;
};

struct Slide {
  std::string slide_id;
  std::string name;
  std::shared_ptr<const OpList> ops;
  Stamp stamp;
};

struct Participant {
  std::string name;
  ClientKind kind = ClientKind::kWeb;
  std::optional<Pose> pose;
  std::int64_t pose_time = 0;
};

template <class T>
struct Stamped {
  T value;
  Stamp stamp;
};

struct SessionState {
  std::string active_model;
  Stamp active_model_stamp;
  std::optional<Transform> whole_transform;
  Stamp whole_stamp;
  std::map<SessionNodeId, Stamped<Transform>> node_transforms;
  std::map<SessionNodeId, Stamped<bool>> node_visibility;
  std::optional<CutPlaneState> cut_plane;
  Stamp cut_stamp;
  std::optional<PoiState> poi;
  Stamp poi_stamp;
  std::map<std::string, Slide> slides;
  std::map<ClientId, Participant> participants;
  OpId last_op_id = 0;

  /// The whole-model transform, identity when never set.
  Transform whole() const { return whole_transform.value_or(Transform{}); }
};

/// Optional knowledge of which nodes exist; ops naming other nodes are ignored.
struct ApplyContext {
  std::function<bool(const std::string& model_id, SessionNodeId node)> node_exists;
};

struct ApplyOutcome {
  /// Non-empty when the op was ignored (stale node, unknown slide).
  std::string warning;
};

/// Folds one op into `state` in place. Non-ephemeral ops need an op_id
/// strictly greater than the last applied one; ephemeral ones may repeat it.
/// Throws ProtocolError on an out-of-order op; never leaves the state invalid.
ApplyOutcome apply_op(SessionState& state, const SessionOp& op, const ApplyContext* context = nullptr);
SessionState apply(SessionState state, const SessionOp& op);
SessionState fold(const OpList& log);

/// Minimal ops that rebuild the state's model-related dimensions (and, when
/// `include_slides`, its slides), numbered densely from 1.
OpList state_to_ops(const SessionState& state, bool include_slides = true);

/// Stores a snapshot of the current state under `slide_id`.
void create_slide(SessionState& state, const std::string& slide_id, const std::string& name,
                  const Stamp& stamp);
/// Replaces model-related dimensions with the slide's. Throws
/// Error("unknown_slide") when missing.
void load_slide(SessionState& state, const std::string& slide_id);

struct CanonicalOptions {
  bool include_participants = false;
  bool include_last_op = false;
};

/// Key-sorted JSON with every real printed as fixed 9-decimal text (negative
/// zero printed as zero); equal states give equal bytes.
std::string canonical_serialize(const SessionState& state, const CanonicalOptions& options = {});
/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string state_hash(const SessionState& state);

/// Compacts an op_id-ordered log: folding the result equals folding the log
/// (participants aside), ephemeral ops are dropped, op_ids restart at 1, and
/// squash(squash(L)) == squash(L). Throws ProtocolError on unordered input.
OpList squash(const OpList& log);

/// Squashed log followed by Join and last-pose ops for live participants.
/// Participant ops take op_ids after the squashed ones; poses repeat the last.
OpList late_join_bundle(const OpList& log);
/// Same, from an already folded state.
OpList late_join_bundle(const SessionState& state);

}  // namespace orbitcad::session
