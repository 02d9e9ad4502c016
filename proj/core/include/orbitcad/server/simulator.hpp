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

#include <chrono>
#include <string>
#include <vector>

namespace orbitcad::server {

struct SimulationSpec {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  std::string token;
  std::string session_id;
  std::size_t clients = 20;
  std::size_t ops_per_client = 100;
  /// Aggregate send rate; 0 sends as fast as the clients can.
  double ops_per_second = 0.0;
  std::uint64_t seed = 1;
  /// Drops client 0 halfway through and reconnects it.
  bool disconnect_rejoin = true;
  /// Node ids 1..node_count are targeted.
  session::SessionNodeId node_count = 20;
  std::chrono::milliseconds timeout{30'000};
};

struct ClientReport {
  session::ClientId cid;
  std::size_t sent = 0;  // persistent ops
  std::size_t poses_sent = 0;
  std::size_t acked = 0;
  std::size_t errors = 0;
  session::OpId watermark = 0;
  std::string state_hash;
};

struct SimulationReport {
  std::uint64_t seed = 0;
  std::size_t ops_sent = 0;
  std::size_t poses_sent = 0;
  std::size_t ops_acked = 0;
  std::size_t errors = 0;
  session::OpId server_watermark = 0;
  std::string server_hash;
  std::vector<ClientReport> clients;
  std::string rejoined_cid;
  bool converged = false;
  double elapsed_seconds = 0.0;
};

nlohmann::json report_to_json(const SimulationReport& report);

/// Runs concurrent scripted clients against a live server and checks that
/// every client's folded state matches the server's.
SimulationReport simulate(const SimulationSpec& spec);

}  // namespace orbitcad::server
