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

#include "orbitcad/server/session_hub.hpp"

#include "orbitcad/session/wire.hpp"

#include <spdlog/spdlog.h>

namespace orbitcad::server {

using namespace orbitcad::session;

namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct Connected {
  ClientInfo info;
  std::shared_ptr<ClientChannel> channel;
  std::chrono::steady_clock::time_point last_pose{};
};

}  // namespace

struct SessionHub::Live {
  std::string id;
  std::mutex mu;
  SessionState state;
  std::unique_ptr<SegmentLog> log;
  std::map<ClientId, Connected> clients;
  std::size_t since_compaction = 0;
  bool read_only = false;

  void broadcast(const std::shared_ptr<const std::string>& frame) {
    for (auto& [cid, c] : clients) c.channel->send(frame);
  }
};

SessionHub::SessionHub(Store& store, HubOptions options) : store_(store), options_(options) {}

SessionHub::~SessionHub() {
  stop();
  flush_all();
}

void SessionHub::start() {
  std::lock_guard lock(worker_mu_);
  if (worker_.joinable()) return;
  stopping_ = false;
  worker_ = std::thread([this] { run_background(); });
}

void SessionHub::stop() {
  {
    std::lock_guard lock(worker_mu_);
    stopping_ = true;
  }
  worker_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void SessionHub::run_background() {
  std::unique_lock lock(worker_mu_);
  while (!stopping_) {
    worker_cv_.wait_for(lock, options_.flush_interval, [this] { return stopping_; });
    if (stopping_) break;
    lock.unlock();
    std::vector<std::string> ids;
    {
      std::lock_guard g(mu_);
      for (const auto& [id, s] : live_) ids.push_back(id);
    }
    for (const std::string& id : ids) {
      try {
        compact(id);
      } catch (const std::exception& e) {
        spdlog::error("compaction of session {} failed: {}", id, e.what());
      }
    }
    lock.lock();
  }
}

bool SessionHub::exists(const std::string& session_id) const {
  return store_.session(session_id).has_value();
}

std::shared_ptr<SessionHub::Live> SessionHub::find(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  auto it = live_.find(session_id);
  return it == live_.end() ? nullptr : it->second;
}

std::shared_ptr<SessionHub::Live> SessionHub::open(const std::string& session_id) {
  std::lock_guard lock(mu_);
  if (auto it = live_.find(session_id); it != live_.end()) return it->second;
  if (!store_.session(session_id)) throw Error("not_found", "unknown session " + session_id);
  auto s = std::make_shared<Live>();
  s->id = session_id;
  s->log = std::make_unique<SegmentLog>(store_.sessions_dir(), session_id, options_.sync_each_append);
  RecoveredLog rec = s->log->recover();
  if (rec.discarded_bytes > 0) {
    spdlog::warn("session {}: ignored {} torn or corrupt trailing bytes", session_id, rec.discarded_bytes);
  }
  for (const SessionOp& op : rec.base) apply_op(s->state, op);
  s->state.last_op_id = std::max(s->state.last_op_id, rec.covers_through);
  for (const SessionOp& op : rec.tail) apply_op(s->state, op);
  s->state.participants.clear();
  s->since_compaction = rec.tail.size();
  live_[session_id] = s;
  return s;
}

void SessionHub::validate(const Live& s, const OpPayload& payload) const {
  const SessionState& st = s.state;
  std::shared_ptr<const SceneModel> model;
  if (!st.active_model.empty()) {
    auto rec = store_.model(st.active_model);
    if (rec && rec->status == ModelStatus::kReady) {
      try {
        model = store_.load_model(st.active_model);
      } catch (const std::exception&) {
        model.reset();
      }
    }
  }
  auto check_node = [&](SessionNodeId n) {
    if (model && !model->has_node(NodeId{n})) {
      throw Error("unknown_node", "node " + std::to_string(n) + " is not in model " + st.active_model);
    }
  };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SetActiveModel>) {
          if (!store_.model(p.model_id)) throw Error("unknown_model", "unknown model " + p.model_id);
        } else if constexpr (std::is_same_v<T, TransformNode> || std::is_same_v<T, SetNodeVisibility>) {
          check_node(p.node);
        } else if constexpr (std::is_same_v<T, NudgeTransform>) {
          if (p.node) check_node(*p.node);
        } else if constexpr (std::is_same_v<T, PlacePoi>) {
          if (p.anchor) check_node(*p.anchor);
        } else if constexpr (std::is_same_v<T, LoadSlide> || std::is_same_v<T, DeleteSlide>) {
          if (!st.slides.count(p.slide_id)) throw Error("unknown_slide", "unknown slide " + p.slide_id);
        } else if constexpr (std::is_same_v<T, Join> || std::is_same_v<T, Leave>) {
          throw Error("invalid_op", "join and leave are issued by the server");
        }
      },
      payload);
}

SessionOp SessionHub::sequence(Live& s, const ClientId& cid, OpPayload payload) {
  if (s.read_only) throw Error("session_read_only", "session " + s.id + " is read-only after a disk failure");
  SessionOp op;
  op.client_id = cid;
  op.wall_time = now_ms();
  if (std::holds_alternative<ParticipantPose>(payload)) {
    op.op_id = s.state.last_op_id;
    op.payload = std::move(payload);
    apply_op(s.state, op);
    s.broadcast(std::make_shared<const std::string>(encode_op(op)));
    return op;
  }
  op.op_id = s.state.last_op_id + 1;
  if (auto* cs = std::get_if<CreateSlide>(&payload); cs && cs->slide_id.empty()) {
    cs->slide_id = "slide-" + std::to_string(op.op_id);
  }
  op.payload = std::move(payload);
  try {
    s.log->append(op);
  } catch (const std::exception& e) {
    s.read_only = true;
    spdlog::error("session {} is now read-only: {}", s.id, e.what());
    s.broadcast(std::make_shared<const std::string>(encode_error("session_read_only", e.what())));
    throw Error("session_read_only", e.what());
  }
  apply_op(s.state, op);
  ++s.since_compaction;
  s.broadcast(std::make_shared<const std::string>(encode_op(op)));
  return op;
}

ClientId SessionHub::join(const std::string& session_id, ClientInfo info, std::shared_ptr<ClientChannel> channel) {
  auto s = open(session_id);
  std::lock_guard lock(s->mu);
  if (info.cid.empty() || s->clients.count(info.cid)) {
    info.cid = (info.name.empty() ? std::string("client") : info.name) + "#" + std::to_string(next_client_++);
  }
  channel->send(std::make_shared<const std::string>(encode_sync(s->state.last_op_id, late_join_bundle(s->state), info.cid)));
  const ClientId cid = info.cid;
  Join j{info.name, info.kind};
  s->clients[cid] = Connected{std::move(info), std::move(channel), {}};
  try {
    sequence(*s, cid, j);
  } catch (const Error& e) {
    spdlog::warn("session {}: join of {} not persisted: {}", session_id, cid, e.what());
  }
  return cid;
}

void SessionHub::leave(const std::string& session_id, const ClientId& cid) {
  auto s = find(session_id);
  if (!s) return;
  std::lock_guard lock(s->mu);
  if (s->clients.erase(cid) == 0) return;
  try {
    sequence(*s, cid, Leave{});
  } catch (const Error& e) {
    spdlog::warn("session {}: leave of {} not persisted: {}", session_id, cid, e.what());
  }
}

void SessionHub::handle_message(const std::string& session_id, const ClientId& cid, std::string_view text) {
  auto s = find(session_id);
  if (!s) return;
  std::lock_guard lock(s->mu);
  auto it = s->clients.find(cid);
  if (it == s->clients.end()) return;
  Connected& c = it->second;
  auto reply_error = [&](std::string_view code, std::string_view msg) {
    c.channel->send(std::make_shared<const std::string>(encode_error(code, msg)));
  };
  SessionOp op;
  try {
    op = decode_op(text);
  } catch (const Error& e) {
    reply_error("bad_frame", e.what());
    return;
  }
  const bool pose = is_ephemeral(op);
  if (!pose && c.info.role == Role::kViewer) {
    reply_error("forbidden", "viewers may only send pose updates");
    return;
  }
  if (pose) {
    auto now = std::chrono::steady_clock::now();
    if (c.last_pose != std::chrono::steady_clock::time_point{} && now - c.last_pose < options_.pose_interval) return;
    c.last_pose = now;
  }
  try {
    validate(*s, op.payload);
    sequence(*s, cid, std::move(op.payload));
  } catch (const Error& e) {
    reply_error(e.code(), e.what());
  }
}

SessionOp SessionHub::submit(const std::string& session_id, const ClientId& cid, OpPayload payload) {
  auto s = open(session_id);
  std::lock_guard lock(s->mu);
  validate(*s, payload);
  return sequence(*s, cid, std::move(payload));
}

SessionSnapshot SessionHub::snapshot(const std::string& session_id) {
  auto s = open(session_id);
  std::lock_guard lock(s->mu);
  SessionSnapshot snap{s->state, s->state.last_op_id, {}, s->read_only};
  for (const auto& [cid, c] : s->clients) snap.clients.push_back(cid);
  return snap;
}

void SessionHub::flush(const std::string& session_id) {
  auto s = find(session_id);
  if (!s) return;
  std::lock_guard lock(s->mu);
  s->log->flush();
}

void SessionHub::compact(const std::string& session_id) {
  auto s = find(session_id);
  if (!s) return;
  std::lock_guard lock(s->mu);
  if (s->read_only) return;
  s->log->flush();
  if (s->since_compaction == 0) return;
  s->log->compact(state_to_ops(s->state, true), s->state.last_op_id);
  s->since_compaction = 0;
}

void SessionHub::flush_all() {
  std::vector<std::shared_ptr<Live>> all;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, s] : live_) all.push_back(s);
  }
  for (auto& s : all) {
    std::lock_guard lock(s->mu);
    try {
      s->log->flush();
    } catch (const std::exception& e) {
      spdlog::error("flush of session {} failed: {}", s->id, e.what());
    }
  }
}

void SessionHub::remove(const std::string& session_id) {
  std::shared_ptr<Live> s;
  {
    std::lock_guard lock(mu_);
    if (auto it = live_.find(session_id); it != live_.end()) {
      s = it->second;
      live_.erase(it);
    }
  }
  if (s) {
    std::lock_guard lock(s->mu);
    for (auto& [cid, c] : s->clients) c.channel->close("session deleted");
    s->clients.clear();
    s->log->remove_all();
  } else {
    SegmentLog(store_.sessions_dir(), session_id).remove_all();
  }
}

std::size_t SessionHub::on_disk_records(const std::string& session_id) {
  auto s = open(session_id);
  std::lock_guard lock(s->mu);
  return s->log->record_count();
}

}  // namespace orbitcad::server
