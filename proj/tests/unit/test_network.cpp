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

#include "fixtures.hpp"

#include "orbitcad/server/api.hpp"
#include "orbitcad/server/http_server.hpp"
#include "orbitcad/server/rest_client.hpp"
#include "orbitcad/server/session_client.hpp"
#include "orbitcad/server/simulator.hpp"
#include "orbitcad/session/state.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace orbitcad;
using namespace orbitcad::server;
using namespace orbitcad::session;
using namespace orbitcad::testing;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

struct LiveServer {
  TempDir dir{"orbitcad-net"};
  Store store{dir.path()};
  SessionHub hub{store};
  Api api{store, hub};
  HttpServer http{api, hub, store, ServerOptions{"127.0.0.1", 0, 2}};
  std::string admin = store.bootstrap_admin("root-token");
  std::uint16_t port = http.start();
  RestClient rest{"127.0.0.1", port, admin};

  std::string session() {
    const std::string pid = rest.json_call("POST", "/api/projects", {{"name", "net"}})["project_id"];
    return rest.json_call("POST", "/api/sessions", {{"project_id", pid}, {"name", "s"}})["session_id"];
  }
  ClientOptions client(const std::string& sid, const std::string& name, const std::string& token = "root-token") {
    ClientOptions o;
    o.port = port;
    o.session_id = sid;
    o.token = token;
    o.name = name;
    return o;
  }
  ~LiveServer() {
    http.stop();
    api.drain();
  }
};

}  // namespace

TEST_CASE("health and REST over HTTP") {
  LiveServer s;
  CHECK(RestClient("127.0.0.1", s.port).call("GET", "/healthz").status == 200);
  CHECK(RestClient("127.0.0.1", s.port).call("GET", "/api/users/me").status == 401);
  CHECK(s.rest.json_call("GET", "/api/users/me")["admin"] == true);
  try {
    s.rest.json_call("GET", "/api/projects/none");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "not_found");
  }
}

TEST_CASE("two clients see the same op ids") {
  LiveServer s;
  const std::string sid = s.session();
  SessionClient a(s.client(sid, "alice"));
  SessionClient b(s.client(sid, "bob"));
  a.connect();
  b.connect();
  CHECK(a.cid() != b.cid());
  a.send(PlacePoi{Vec3(1, 2, 3), std::nullopt});
  REQUIRE(a.wait_settled(1, 5s));
  const OpId id = a.watermark();
  REQUIRE(b.wait_for(id, 5s));
  REQUIRE(b.state().poi);
  CHECK(b.state().poi->placer == a.cid());
  CHECK(state_hash(a.state()) == state_hash(b.state()));

  b.send(LoadSlide{"missing"});
  CHECK(b.wait_for_errors(1, 5s));
  CHECK(b.errors().front().code == "unknown_slide");

  const OpId before = s.hub.snapshot(sid).watermark;
  b.send(ParticipantPose{Pose{}});
  REQUIRE(a.wait_for(before, 5s));
  std::this_thread::sleep_for(200ms);
  CHECK(s.hub.snapshot(sid).watermark == before);
  CHECK(s.hub.on_disk_records(sid) == before);

  SessionClient late(s.client(sid, "late"));
  late.connect();
  CHECK(canonical_serialize(late.state()) == canonical_serialize(a.state()));

  b.disconnect();
  a.disconnect();
  late.disconnect();
}

TEST_CASE("websocket joins are authorized") {
  LiveServer s;
  const std::string sid = s.session();
  SessionClient nobody(s.client(sid, "x", "bad-token"));
  CHECK_THROWS(nobody.connect(3s));
  SessionClient lost(s.client("missing", "x"));
  CHECK_THROWS(lost.connect(3s));

  const json viewer = s.rest.json_call("POST", "/api/users", {{"name", "v"}});
  const std::string pid = s.rest.json_call("GET", "/api/sessions/" + sid)["project_id"];
  SessionClient outsider(s.client(sid, "v", viewer["token"]));
  CHECK_THROWS(outsider.connect(3s));
  s.rest.json_call("PUT", "/api/projects/" + pid + "/members/" + viewer["user_id"].get<std::string>(), {{"role", "viewer"}});
  SessionClient watcher(s.client(sid, "v", viewer["token"]));
  watcher.connect();
  watcher.send(ClearPoi{});
  CHECK(watcher.wait_for_errors(1, 5s));
  CHECK(watcher.errors().front().code == "forbidden");
}

TEST_CASE("simulated clients converge") {
  LiveServer s;
  SimulationSpec spec;
  spec.port = s.port;
  spec.token = s.admin;
  spec.session_id = s.session();
  spec.clients = 6;
  spec.ops_per_client = 40;
  spec.seed = 3;
  const SimulationReport r = simulate(spec);
  CHECK(r.converged);
  CHECK(r.ops_sent + r.poses_sent == 240);
  CHECK(r.ops_acked + r.errors == r.ops_sent);
  CHECK(r.clients.size() == 6);
  for (const auto& c : r.clients) CHECK(c.state_hash == r.server_hash);
  CHECK_FALSE(r.rejoined_cid.empty());
  CHECK(report_to_json(r)["converged"] == true);
}
