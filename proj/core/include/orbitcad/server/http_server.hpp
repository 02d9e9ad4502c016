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

#include "orbitcad/server/api.hpp"

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>

#include <memory>
#include <thread>
#include <vector>

namespace orbitcad::server {

struct ServerOptions {
  std::string bind_address = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  std::size_t threads = 4;
  std::size_t max_body_bytes = std::size_t{1} << 30;
};

/// HTTP/1.1 REST endpoint plus WebSocket session channels on
/// `/ws/sessions/{id}?token=..&name=..&kind=headset|web&cid=..`.
class HttpServer {
 public:
  HttpServer(Api& api, SessionHub& hub, Store& store, ServerOptions options = {});
  ~HttpServer();

  /// Binds and starts the I/O threads. Returns the bound port.
  std::uint16_t start();
  void stop();
  /// Blocks until stop() is called.
  void wait();
  std::uint16_t port() const { return port_; }

 private:
  void accept();

  Api& api_;
  SessionHub& hub_;
  Store& store_;
  ServerOptions options_;
  boost::asio::io_context ioc_;
  boost::asio::ip::tcp::acceptor acceptor_;
  std::vector<std::thread> threads_;
  std::uint16_t port_ = 0;
};

}  // namespace orbitcad::server
