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

#include "orbitcad/server/simulator.hpp"

#include "orbitcad/server/rest_client.hpp"
#include "orbitcad/server/session_client.hpp"
#include "orbitcad/session/random_ops.hpp"

#include <spdlog/spdlog.h>

#include <random>
#include <thread>

namespace orbitcad::server {

using namespace session;
using Clock = std::chrono::steady_clock;

nlohmann::json report_to_json(const SimulationReport& r) {
  nlohmann::json clients = nlohmann::json::array();
  for (const ClientReport& c : r.clients) {
    clients.push_back({{"cid", c.cid},
                       {"sent", c.sent},
                       {"poses_sent", c.poses_sent},
                       {"acked", c.acked},
                       {"errors", c.errors},
                       {"watermark", c.watermark},
                       {"state_hash", c.state_hash}});
  }
  return {{"seed", r.seed},
          {"converged", r.converged},
          {"ops_sent", r.ops_sent},
          {"poses_sent", r.poses_sent},
          {"ops_acked", r.ops_acked},
          {"errors", r.errors},
          {"server_watermark", r.server_watermark},
          {"server_hash", r.server_hash},
          {"rejoined_cid", r.rejoined_cid},
          {"elapsed_seconds", r.elapsed_seconds},
          {"clients", clients}};
}

namespace {

struct Worker {
  std::size_t index = 0;
  std::unique_ptr<SessionClient> client;
  std::unique_ptr<RandomOpSource> source;
  std::mt19937_64 timing;
  std::size_t sent_total = 0;
  std::size_t poses_total = 0;
  std::size_t acked_before = 0;
  std::size_t errors_before = 0;
  std::size_t sent_current = 0;  // on the current connection
  std::string failure;
};

ClientOptions client_options(const SimulationSpec& spec, std::size_t i) {
  ClientOptions o;
  o.host = spec.host;
  o.port = spec.port;
  o.session_id = spec.session_id;
  o.token = spec.token;
  o.name = "sim" + std::to_string(i);
  o.cid = o.name;
  o.kind = i % 2 == 0 ? ClientKind::kHeadset : ClientKind::kWeb;
  return o;
}

}  // namespace

SimulationReport simulate(const SimulationSpec& spec) {
  const auto start = Clock::now();
  const auto deadline = start + spec.timeout;
  auto remaining = [&] {
    return std::max(std::chrono::milliseconds(1),
                    std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()));
  };
  SimulationReport report;
  report.seed = spec.seed;

  std::vector<Worker> workers(spec.clients);
  std::seed_seq seq{spec.seed};
  std::vector<std::uint64_t> seeds(spec.clients * 2);
  {
    std::vector<std::uint32_t> raw(seeds.size() * 2);
    seq.generate(raw.begin(), raw.end());
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = (std::uint64_t{raw[2 * i]} << 32) | raw[2 * i + 1];
  }
  for (std::size_t i = 0; i < spec.clients; ++i) {
    Worker& w = workers[i];
    w.index = i;
    RandomOpOptions ro;
    ro.node_count = spec.node_count;
    ro.models.clear();
    ro.include_poses = true;
    ro.slide_prefix = "sim" + std::to_string(i) + "-";
    w.source = std::make_unique<RandomOpSource>(seeds[2 * i], ro);
    w.timing.seed(seeds[2 * i + 1]);
    w.client = std::make_unique<SessionClient>(client_options(spec, i));
    w.client->connect(remaining());
  }

  const double per_client_interval_ms =
      spec.ops_per_second > 0 ? 1000.0 * static_cast<double>(spec.clients) / spec.ops_per_second : 0.0;

  auto run = [&](Worker& w) {
    try {
      for (std::size_t k = 0; k < spec.ops_per_client; ++k) {
        if (spec.disconnect_rejoin && w.index == 0 && k == spec.ops_per_client / 2) {
          w.client->wait_settled(w.sent_current, remaining());
          w.acked_before += w.client->acked();
          w.errors_before += w.client->errors().size();
          w.client->abort();
          w.client = std::make_unique<SessionClient>(client_options(spec, w.index));
          w.client->connect(remaining());
          w.sent_current = 0;
        }
        OpPayload p = w.source->next_payload();
        const bool pose = std::holds_alternative<ParticipantPose>(p);
        w.client->send(std::move(p));
        if (pose) {
          ++w.poses_total;
        } else {
          ++w.sent_current;
          ++w.sent_total;
        }
        double wait_ms = per_client_interval_ms > 0
                             ? std::uniform_real_distribution<double>(0.5, 1.5)(w.timing) * per_client_interval_ms
                             : std::uniform_real_distribution<double>(0.0, 1.0)(w.timing);
        std::this_thread::sleep_for(std::chrono::microseconds(static_cast<std::int64_t>(wait_ms * 1000)));
        if (Clock::now() > deadline) throw Error("timeout", "simulation exceeded its time budget");
      }
      if (!w.client->wait_settled(w.sent_current, remaining())) {
        throw Error("timeout", "ops of " + w.client->cid() + " were not all acknowledged");
      }
    } catch (const std::exception& e) {
      w.failure = e.what();
    }
  };
  std::vector<std::thread> threads;
  for (Worker& w : workers) threads.emplace_back(run, std::ref(w));
  for (auto& t : threads) t.join();
  report.rejoined_cid = spec.disconnect_rejoin && !workers.empty() ? workers[0].client->cid() : "";

  // Wait for the server's watermark to settle and every client to catch up.
  RestClient rest(spec.host, spec.port, spec.token);
  nlohmann::json server;
  OpId last = 0;
  for (;;) {
    server = rest.json_call("GET", "/api/sessions/" + spec.session_id);
    const OpId w = server.at("watermark").get<OpId>();
    bool all = true;
    for (Worker& wk : workers) all = wk.client->wait_for(w, remaining()) && all;
    if (w == last || Clock::now() > deadline) break;
    last = w;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (!all) break;
  }
  report.server_watermark = server.at("watermark").get<OpId>();
  report.server_hash = server.at("state_hash").get<std::string>();

  report.converged = true;
  for (Worker& w : workers) {
    ClientReport c;
    c.cid = w.client->cid();
    c.sent = w.sent_total;
    c.poses_sent = w.poses_total;
    c.acked = w.acked_before + w.client->acked();
    c.errors = w.errors_before + w.client->errors().size();
    c.watermark = w.client->watermark();
    c.state_hash = state_hash(w.client->state());
    report.ops_sent += c.sent;
    report.poses_sent += c.poses_sent;
    report.ops_acked += c.acked;
    report.errors += c.errors;
    if (!w.failure.empty()) {
      spdlog::warn("client {}: {}", c.cid, w.failure);
      report.converged = false;
    }
    if (c.state_hash != report.server_hash || c.watermark < report.server_watermark) report.converged = false;
    report.clients.push_back(std::move(c));
  }
  for (Worker& w : workers) w.client->disconnect();
  report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace orbitcad::server
