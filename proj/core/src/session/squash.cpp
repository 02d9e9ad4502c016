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

namespace orbitcad::session {

OpList squash(const OpList& log) {
  SessionState s;
  for (const SessionOp& op : log) apply_op(s, op);
  return state_to_ops(s, true);
}

OpList late_join_bundle(const SessionState& state) {
  OpList ops = state_to_ops(state, true);
  for (const auto& [cid, p] : state.participants) {
    ops.push_back(SessionOp{static_cast<OpId>(ops.size() + 1), cid, 0, Join{p.name, p.kind}});
  }
  const OpId last = ops.empty() ? 0 : ops.back().op_id;
  for (const auto& [cid, p] : state.participants) {
    if (p.pose) ops.push_back(SessionOp{last, cid, p.pose_time, ParticipantPose{*p.pose}});
  }
  return ops;
}

OpList late_join_bundle(const OpList& log) {
  SessionState s;
  for (const SessionOp& op : log) apply_op(s, op);
  return late_join_bundle(s);
}

}  // namespace orbitcad::session
