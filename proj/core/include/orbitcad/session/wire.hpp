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

#include <json.hpp>

#include <string>
#include <string_view>

namespace orbitcad::session {

inline constexpr int kWireVersion = 1;

/// {"v":1,"op":<op_id>,"cid":<client>,"t":<millis>,"type":<type>,"body":{...}}.
/// Reals are written in shortest round-trip form, so decode(encode(op)) is exact.
nlohmann::json op_to_json(const SessionOp& op);
/// Missing "op", "cid" or "t" default to 0 / "" (client-originated frames).
/// Throws ProtocolError on a wrong version, unknown type or malformed body.
SessionOp op_from_json(const nlohmann::json& j);
std::string encode_op(const SessionOp& op);
SessionOp decode_op(std::string_view text);

nlohmann::json ops_to_json(const OpList& ops);
OpList ops_from_json(const nlohmann::json& j);

/// Server-to-client frames besides plain op frames.
/// `cid` tells the joining client the id the server assigned to it.
std::string encode_sync(OpId watermark, const OpList& ops, std::string_view cid = {});
std::string encode_error(std::string_view code, std::string_view message);

enum class FrameKind { kOp, kSync, kError };

struct ServerFrame {
  FrameKind kind = FrameKind::kOp;
  SessionOp op;
  OpId watermark = 0;
  OpList ops;
  ClientId cid;
  std::string code;
  std::string message;
};

/// Frames with a "frame" member are sync/error frames; anything else is an op.
ServerFrame decode_server_frame(std::string_view text);

}  // namespace orbitcad::session
