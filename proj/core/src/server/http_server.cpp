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

#include "orbitcad/server/http_server.hpp"

#include "orbitcad/session/wire.hpp"

#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include <deque>

namespace orbitcad::server {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

Request to_request(const http::request<http::string_body>& req) {
  Request r;
  r.method = std::string(req.method_string());
  parse_target(std::string_view(req.target().data(), req.target().size()), r.path, r.query);
  for (const auto& f : req) {
    std::string name(f.name_string());
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    r.headers[name] = std::string(f.value());
  }
  r.body = req.body();
  return r;
}

http::response<http::string_body> to_http(const Response& resp, unsigned version, bool keep_alive) {
  http::response<http::string_body> out{static_cast<http::status>(resp.status), version};
  out.set(http::field::server, "orbitcad");
  out.set(http::field::content_type, resp.content_type);
  for (const auto& [k, v] : resp.headers) out.set(k, v);
  out.keep_alive(keep_alive);
  out.body() = resp.body;
  out.prepare_payload();
  return out;
}

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, SessionHub& hub) : ws_(std::move(socket)), hub_(hub) {}

  void run(http::request<http::string_body> req, std::string session_id, ClientInfo info) {
    session_id_ = std::move(session_id);
    info_ = std::move(info);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(std::size_t{16} << 20);
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void enqueue(std::shared_ptr<const std::string> frame) {
    net::post(ws_.get_executor(), [self = shared_from_this(), frame = std::move(frame)] {
      if (self->closed_) return;
      self->queue_.push_back(frame);
      if (self->queue_.size() == 1) self->write_next();
    });
  }

  void close(std::string reason) {
    net::post(ws_.get_executor(), [self = shared_from_this(), reason = std::move(reason)] {
      if (self->closed_) return;
      self->closing_ = true;
      self->close_reason_ = reason;
      if (self->queue_.empty()) self->do_close();
    });
  }

 private:
  class Channel : public ClientChannel {
   public:
    explicit Channel(std::weak_ptr<WsSession> s) : s_(std::move(s)) {}
    void send(std::shared_ptr<const std::string> frame) override {
      if (auto s = s_.lock()) s->enqueue(std::move(frame));
    }
    void close(std::string_view reason) override {
      if (auto s = s_.lock()) s->close(std::string(reason));
    }

   private:
    std::weak_ptr<WsSession> s_;
  };

  void on_accept(beast::error_code ec) {
    if (ec) return;
    ws_.text(true);
    try {
      cid_ = hub_.join(session_id_, info_, std::make_shared<Channel>(weak_from_this()));
    } catch (const std::exception& e) {
      enqueue(std::make_shared<const std::string>(session::encode_error("join_failed", e.what())));
      close("join failed");
      return;
    }
    joined_ = true;
    read();
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      finish();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    try {
      hub_.handle_message(session_id_, cid_, text);
    } catch (const std::exception& e) {
      spdlog::warn("session {}: {}", session_id_, e.what());
    }
    read();
  }

  void write_next() {
    ws_.async_write(net::buffer(*queue_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      queue_.clear();
      closed_ = true;
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) {
      write_next();
    } else if (closing_) {
      do_close();
    }
  }

  void do_close() {
    closed_ = true;
    ws_.async_close(websocket::close_reason(websocket::close_code::normal, close_reason_),
                    [self = shared_from_this()](beast::error_code) {});
  }

  void finish() {
    closed_ = true;
    if (joined_) {
      joined_ = false;
      try {
        hub_.leave(session_id_, cid_);
      } catch (const std::exception& e) {
        spdlog::warn("session {}: leave failed: {}", session_id_, e.what());
      }
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  SessionHub& hub_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  std::string session_id_;
  ClientInfo info_;
  session::ClientId cid_;
  std::string close_reason_;
  bool joined_ = false;
  bool closing_ = false;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Api& api, SessionHub& hub, Store& store, std::size_t max_body)
      : stream_(std::move(socket)), api_(api), hub_(hub), store_(store), max_body_(max_body) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read, shared_from_this()));
  }

 private:
  void read() {
    parser_.emplace();
    parser_->body_limit(max_body_);
    stream_.expires_after(std::chrono::seconds(300));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    if (ec) return;
    auto req = parser_->release();
    if (websocket::is_upgrade(req)) {
      upgrade(std::move(req));
      return;
    }
    Response resp;
    const Request r = to_request(req);
    if (r.path == "/healthz") {
      resp.body = R"({"ok":true})";
    } else {
      resp = api_.handle(r);
    }
    send(to_http(resp, req.version(), req.keep_alive()));
  }

  void upgrade(http::request<http::string_body> req) {
    const Request r = to_request(req);
    constexpr std::string_view prefix = "/ws/sessions/";
    auto reject = [&](int status, std::string_view code, std::string_view msg) {
      Response resp;
      resp.status = status;
      resp.body = nlohmann::json{{"error", {{"code", code}, {"message", msg}}}}.dump();
      send(to_http(resp, req.version(), false));
    };
    if (r.path.rfind(prefix, 0) != 0) return reject(404, "not_found", "no websocket route for " + r.path);
    const std::string session_id = r.path.substr(prefix.size());
    auto user = api_.authenticate(r);
    if (!user) return reject(401, "unauthorized", "missing or invalid token");
    auto meta = store_.session(session_id);
    if (!meta) return reject(404, "not_found", "unknown session " + session_id);
    auto role = store_.role_in(*user, meta->project_id);
    if (!role) return reject(403, "forbidden", "not a member of project " + meta->project_id);
    ClientInfo info;
    info.user_id = user->user_id;
    info.role = *role;
    auto q = [&](const char* k) {
      auto it = r.query.find(k);
      return it == r.query.end() ? std::string() : it->second;
    };
    info.name = q("name").empty() ? user->name : q("name");
    info.kind = q("kind") == "headset" ? session::ClientKind::kHeadset : session::ClientKind::kWeb;
    info.cid = q("cid");
    stream_.expires_never();
    std::make_shared<WsSession>(stream_.release_socket(), hub_)->run(std::move(req), session_id, std::move(info));
  }

  void send(http::response<http::string_body> resp) {
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(resp));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (sp->need_eof()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  Api& api_;
  SessionHub& hub_;
  Store& store_;
  std::size_t max_body_;
};

}  // namespace

HttpServer::HttpServer(Api& api, SessionHub& hub, Store& store, ServerOptions options)
    : api_(api), hub_(hub), store_(store), options_(std::move(options)), acceptor_(net::make_strand(ioc_)) {}

HttpServer::~HttpServer() { stop(); }

std::uint16_t HttpServer::start() {
  tcp::endpoint ep{net::ip::make_address(options_.bind_address), options_.port};
  acceptor_.open(ep.protocol());
  acceptor_.set_option(net::socket_base::reuse_address(true));
  acceptor_.bind(ep);
  acceptor_.listen(net::socket_base::max_listen_connections);
  port_ = acceptor_.local_endpoint().port();
  accept();
  for (std::size_t i = 0; i < std::max<std::size_t>(options_.threads, 1); ++i) {
    threads_.emplace_back([this] { ioc_.run(); });
  }
  spdlog::info("listening on {}:{}", options_.bind_address, port_);
  return port_;
}

void HttpServer::accept() {
  acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted) return;
    if (!ec) std::make_shared<HttpSession>(std::move(socket), api_, hub_, store_, options_.max_body_bytes)->run();
    accept();
  });
}

void HttpServer::stop() {
  if (threads_.empty()) return;
  net::post(acceptor_.get_executor(), [this] {
    beast::error_code ignored;
    acceptor_.close(ignored);
  });
  ioc_.stop();
  wait();
}

void HttpServer::wait() {
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  threads_.clear();
}

}  // namespace orbitcad::server
