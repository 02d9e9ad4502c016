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

namespace orbitcad::server {

/// Blocking HTTP/1.1 client for the REST surface; one connection per call.
class RestClient {
 public:
  RestClient(std::string host, std::uint16_t port, std::string token = {});

  Response call(const std::string& method, const std::string& target, const std::string& body = {},
                const std::string& content_type = "application/json",
                const std::map<std::string, std::string>& headers = {}) const;
  /// Like call() but throws Error(code) from the error body on non-2xx.
  nlohmann::json json_call(const std::string& method, const std::string& target, const nlohmann::json& body = nullptr) const;

  void set_token(std::string token) { token_ = std::move(token); }

 private:
  std::string host_;
  std::uint16_t port_;
  std::string token_;
};

}  // namespace orbitcad::server
