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

#include "orbitcad/server/rest_client.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>

namespace orbitcad::server {

namespace beast = boost::beast;
namespace http = beast::http;
namespace net = boost::asio;
using tcp = net::ip::tcp;

RestClient::RestClient(std::string host, std::uint16_t port, std::string token)
    : host_(std::move(host)), port_(port), token_(std::move(token)) {}

Response RestClient::call(const std::string& method, const std::string& target, const std::string& body,
                          const std::string& content_type, const std::map<std::string, std::string>& headers) const {
  net::io_context ioc;
  tcp::resolver resolver(ioc);
  beast::tcp_stream stream(ioc);
  stream.expires_after(std::chrono::seconds(120));
  try {
    stream.connect(resolver.resolve(host_, std::to_string(port_)));
  } catch (const beast::system_error& e) {
    throw Error("connect_failed", "cannot reach " + host_ + ":" + std::to_string(port_) + ": " + e.what());
  }
  http::request<http::string_body> req{http::string_to_verb(method), target, 11};
  req.set(http::field::host, host_);
  if (!token_.empty()) req.set(http::field::authorization, "Bearer " + token_);
  for (const auto& [k, v] : headers) req.set(k, v);
  if (!body.empty()) {
    req.set(http::field::content_type, content_type);
    req.body() = body;
  }
  req.prepare_payload();
  http::write(stream, req);
  beast::flat_buffer buffer;
  http::response_parser<http::string_body> parser;
  parser.body_limit(std::size_t{1} << 31);
  http::read(stream, buffer, parser);
  auto res = parser.release();
  Response out;
  out.status = static_cast<int>(res.result_int());
  out.content_type = std::string(res[http::field::content_type]);
  for (const auto& f : res) out.headers[std::string(f.name_string())] = std::string(f.value());
  out.body = std::move(res.body());
  beast::error_code ignored;
  stream.socket().shutdown(tcp::socket::shutdown_both, ignored);
  return out;
}

nlohmann::json RestClient::json_call(const std::string& method, const std::string& target,
                                     const nlohmann::json& body) const {
  Response r = call(method, target, body.is_null() ? std::string() : body.dump());
  nlohmann::json j = r.body.empty() ? nlohmann::json(nullptr) : nlohmann::json::parse(r.body, nullptr, false);
  if (r.status < 200 || r.status >= 300) {
    std::string code = "http_" + std::to_string(r.status);
    std::string message = r.body;
    if (j.is_object() && j.contains("error")) {
      code = j["error"].value("code", code);
      message = j["error"].value("message", message);
    }
    throw Error(code, message);
  }
  return j;
}

}  // namespace orbitcad::server
