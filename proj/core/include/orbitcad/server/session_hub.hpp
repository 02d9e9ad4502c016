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

#include "orbitcad/server/segment_store.hpp"
#include "orbitcad/server/store.hpp"
#include "orbitcad/session/state.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace orbitcad::server {

/// Outbound side of one client connection. `send` must not block.
class ClientChannel {
 public:
  virtual ~ClientChannel() = default;
  virtual void send(std::shared_ptr<const std::string> frame) = 0;
  virtual void close(std::string_view reason) = 0;
};

struct ClientInfo {
  session::ClientId cid;  // empty: assigned by the hub
  std::string user_id;
  Role role = Role::kMember;
  std::string name;
  session::ClientKind kind = session::ClientKind::kWeb;
};

struct HubOptions {
  std::chrono::milliseconds flush_interval{30'000};
  bool sync_each_append = false;
  /// Minimum spacing of accepted pose ops per client (20 Hz).
  std::chrono::milliseconds pose_interval{50};
};

struct SessionSnapshot {
  session::SessionState state;
  session::OpId watermark = 0;
  std::vector<session::ClientId> clients;
  bool read_only = false;
};

/// Owns the live sessions: sequencing, persistence, fan-out and compaction.
///
/// Each session has one mutex. Under it an op is numbered, appended to the
/// segment log, folded into the materialized state and queued to every
/// connected channel, so all clients observe the same op order and nothing
/// is echoed before it is on disk.
class SessionHub {
 public:
  SessionHub(Store& store, HubOptions options = {});
  ~SessionHub();

  /// Starts the periodic flush/compaction thread.
  void start();
  void stop();

  bool exists(const std::string& session_id) const;
  /// Sends the late-join bundle to the channel, registers it and broadcasts
  /// its Join. Returns the client id. Throws Error("not_found").
  session::ClientId join(const std::string& session_id, ClientInfo info, std::shared_ptr<ClientChannel> channel);
  void leave(const std::string& session_id, const session::ClientId& cid);
  /// Handles one text frame from a joined client; problems become an error
  /// frame to that client only.
  void handle_message(const std::string& session_id, const session::ClientId& cid, std::string_view text);
  /// Sequences an op on behalf of `cid` without a connection (server-side
  /// tools). Throws Error on rejection.
  session::SessionOp submit(const std::string& session_id, const session::ClientId& cid, session::OpPayload payload);

  SessionSnapshot snapshot(const std::string& session_id);
  void flush(const std::string& session_id);
  void compact(const std::string& session_id);
  void flush_all();
  /// Disconnects clients and deletes the session's log files.
  void remove(const std::string& session_id);
  std::size_t on_disk_records(const std::string& session_id);

 private:
  struct Live;
  std::shared_ptr<Live> open(const std::string& session_id);
  std::shared_ptr<Live> find(const std::string& session_id) const;
  /// Requires the session lock.
  session::SessionOp sequence(Live& s, const session::ClientId& cid, session::OpPayload payload);
  void validate(const Live& s, const session::OpPayload& payload) const;
  void run_background();

  Store& store_;
  HubOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Live>> live_;
  std::atomic<std::uint64_t> next_client_{1};
  std::thread worker_;
  std::mutex worker_mu_;
  std::condition_variable worker_cv_;
  bool stopping_ = false;
};

}  // namespace orbitcad::server
