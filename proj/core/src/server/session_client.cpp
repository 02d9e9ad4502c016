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

#include "orbitcad/server/session_client.hpp"

#include "orbitcad/session/wire.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

namespace orbitcad::server {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using namespace session;

namespace {

std::string encode_query(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

}  // namespace

struct SessionClient::Impl : std::enable_shared_from_this<Impl> {
  ClientOptions opts;
  net::io_context ioc;
  websocket::stream<beast::tcp_stream> ws{ioc};
  beast::flat_buffer buffer;
  std::thread io_thread;
  std::deque<std::string> outbox;
  bool writing = false;

  mutable std::mutex mu;
  mutable std::condition_variable cv;
  SessionState state;
  OpId watermark = 0;
  ClientId cid;
  bool synced = false;
  bool open = false;
  std::string failure;
  std::vector<ClientError> errors;
  std::size_t received = 0;
  std::size_t acked = 0;

  void on_frame(const std::string& text) {
    ServerFrame f;
    try {
      f = decode_server_frame(text);
    } catch (const std::exception& e) {
      spdlog::warn("client {}: undecodable frame: {}", cid, e.what());
      return;
    }
    std::lock_guard lock(mu);
    switch (f.kind) {
      case FrameKind::kSync:
        state = fold(f.ops);
        state.last_op_id = f.watermark;
        watermark = f.watermark;
        cid = f.cid.empty() ? opts.cid : f.cid;
        synced = true;
        break;
      case FrameKind::kOp:
        try {
          apply_op(state, f.op);
        } catch (const std::exception& e) {
          spdlog::warn("client {}: {}", cid, e.what());
        }
        if (!is_ephemeral(f.op)) {
          watermark = std::max(watermark, f.op.op_id);
          if (f.op.client_id == cid && !std::holds_alternative<Join>(f.op.payload) &&
              !std::holds_alternative<Leave>(f.op.payload)) {
            ++acked;
          }
        }
        ++received;
        break;
      case FrameKind::kError:
        errors.push_back({f.code, f.message});
        break;
    }
    cv.notify_all();
  }

  void read() {
    ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        std::lock_guard lock(self->mu);
        self->open = false;
        if (self->failure.empty()) self->failure = ec.message();
        self->cv.notify_all();
        return;
      }
      self->on_frame(beast::buffers_to_string(self->buffer.data()));
      self->buffer.consume(self->buffer.size());
      self->read();
    });
  }

  void write_next() {
    if (outbox.empty()) {
      writing = false;
      return;
    }
    writing = true;
    ws.async_write(net::buffer(outbox.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->outbox.clear();
        self->writing = false;
        return;
      }
      self->outbox.pop_front();
      self->write_next();
    });
  }
};

SessionClient::SessionClient(ClientOptions options) : impl_(std::make_shared<Impl>()) {
  impl_->opts = std::move(options);
}

SessionClient::~SessionClient() { abort(); }

void SessionClient::connect(std::chrono::milliseconds timeout) {
  Impl& m = *impl_;
  tcp::resolver resolver(m.ioc);
  auto results = resolver.resolve(m.opts.host, std::to_string(m.opts.port));
  beast::get_lowest_layer(m.ws).expires_after(timeout);
  beast::get_lowest_layer(m.ws).connect(results);
  beast::get_lowest_layer(m.ws).expires_never();
  std::string target = "/ws/sessions/" + encode_query(m.opts.session_id) + "?token=" + encode_query(m.opts.token) +
                       "&name=" + encode_query(m.opts.name) +
                       "&kind=" + (m.opts.kind == ClientKind::kHeadset ? "headset" : "web");
  if (!m.opts.cid.empty()) target += "&cid=" + encode_query(m.opts.cid);
  try {
    m.ws.handshake(m.opts.host + ":" + std::to_string(m.opts.port), target);
  } catch (const beast::system_error& e) {
    throw Error("connect_failed", std::string("websocket handshake rejected: ") + e.what());
  }
  m.ws.text(true);
  {
    std::lock_guard lock(m.mu);
    m.open = true;
  }
  m.read();
  m.io_thread = std::thread([&m] { m.ioc.run(); });
  std::unique_lock lock(m.mu);
  if (!m.cv.wait_for(lock, timeout, [&] { return m.synced || !m.open; }) || !m.synced) {
    const std::string why = m.failure.empty() ? "timed out waiting for sync" : m.failure;
    lock.unlock();
    abort();
    throw Error("connect_failed", why);
  }
}

void SessionClient::send(OpPayload payload) {
  SessionOp op;
  op.client_id = cid();
  op.payload = std::move(payload);
  net::post(impl_->ioc, [m = impl_, text = encode_op(op)]() mutable {
    m->outbox.push_back(std::move(text));
    if (!m->writing) m->write_next();
  });
}

void SessionClient::disconnect() {
  Impl& m = *impl_;
  if (!m.io_thread.joinable()) return;
  net::post(m.ioc, [m = impl_] {
    auto close = [m] {
      m->ws.async_close(websocket::close_code::normal, [m](beast::error_code) {});
    };
    if (!m->writing) {
      close();
    } else {
      // Let queued writes drain first.
      auto poll = std::make_shared<std::function<void()>>();
      *poll = [m, close, poll] {
        if (m->writing) {
          net::post(m->ioc, *poll);
        } else {
          close();
        }
      };
      net::post(m->ioc, *poll);
    }
  });
  std::unique_lock lock(m.mu);
  m.cv.wait_for(lock, std::chrono::seconds(5), [&] { return !m.open; });
  lock.unlock();
  abort();
}

void SessionClient::abort() {
  Impl& m = *impl_;
  if (m.io_thread.joinable()) {
    m.ioc.stop();
    m.io_thread.join();
  }
  beast::error_code ignored;
  auto& sock = beast::get_lowest_layer(m.ws).socket();
  if (sock.is_open()) {
    sock.shutdown(tcp::socket::shutdown_both, ignored);
    sock.close(ignored);
  }
  // Completes the cancelled handlers so they release their references.
  m.ioc.restart();
  m.ioc.run();
  std::lock_guard lock(m.mu);
  m.open = false;
  m.cv.notify_all();
}

bool SessionClient::connected() const {
  std::lock_guard lock(impl_->mu);
  return impl_->open;
}

ClientId SessionClient::cid() const {
  std::lock_guard lock(impl_->mu);
  return impl_->cid;
}

OpId SessionClient::watermark() const {
  std::lock_guard lock(impl_->mu);
  return impl_->watermark;
}

SessionState SessionClient::state() const {
  std::lock_guard lock(impl_->mu);
  return impl_->state;
}

std::vector<ClientError> SessionClient::errors() const {
  std::lock_guard lock(impl_->mu);
  return impl_->errors;
}

std::size_t SessionClient::ops_received() const {
  std::lock_guard lock(impl_->mu);
  return impl_->received;
}

bool SessionClient::wait_for(OpId op_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(impl_->mu);
  return impl_->cv.wait_for(lock, timeout, [&] { return impl_->watermark >= op_id; });
}

std::size_t SessionClient::acked() const {
  std::lock_guard lock(impl_->mu);
  return impl_->acked;
}

bool SessionClient::wait_settled(std::size_t sent, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(impl_->mu);
  return impl_->cv.wait_for(lock, timeout, [&] { return impl_->acked + impl_->errors.size() >= sent; });
}

bool SessionClient::wait_for_errors(std::size_t count, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(impl_->mu);
  return impl_->cv.wait_for(lock, timeout, [&] { return impl_->errors.size() >= count; });
}

}  // namespace orbitcad::server
