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

#include "orbitcad/session/state.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <string>

namespace orbitcad::server {

struct ClientOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  std::string session_id;
  std::string token;
  std::string name = "client";
  session::ClientKind kind = session::ClientKind::kWeb;
  session::ClientId cid;  // requested id; the server may assign another
};

struct ClientError {
  std::string code;
  std::string message;
};

/// WebSocket session participant that keeps a local fold of the op stream.
///
/// I/O runs on a private thread. All accessors are thread-safe.
class SessionClient {
 public:
  explicit SessionClient(ClientOptions options);
  ~SessionClient();

  SessionClient(const SessionClient&) = delete;
  SessionClient& operator=(const SessionClient&) = delete;

  /// Connects and waits for the late-join sync frame. Throws Error on failure.
  void connect(std::chrono::milliseconds timeout = std::chrono::seconds(10));
  /// Queues an op; the server assigns op_id and wall time.
  void send(session::OpPayload payload);
  /// Closes the socket with a close handshake.
  void disconnect();
  /// Drops the TCP connection without a close handshake.
  void abort();

  bool connected() const;
  session::ClientId cid() const;
  session::OpId watermark() const;
  session::SessionState state() const;
  std::vector<ClientError> errors() const;
  std::size_t ops_received() const;
  /// Own non-pose ops echoed back by the server.
  std::size_t acked() const;

  /// Waits until the local watermark reaches `op_id`.
  bool wait_for(session::OpId op_id, std::chrono::milliseconds timeout) const;
  /// Waits until every one of `sent` non-pose ops was echoed or rejected.
  bool wait_settled(std::size_t sent, std::chrono::milliseconds timeout) const;
  /// Waits until `count` error frames have been received.
  bool wait_for_errors(std::size_t count, std::chrono::milliseconds timeout) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace orbitcad::server
