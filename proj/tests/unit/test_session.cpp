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

#include "orbitcad/session/random_ops.hpp"
#include "orbitcad/session/state.hpp"
#include "orbitcad/session/wire.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <set>

using namespace orbitcad;
using namespace orbitcad::session;

namespace {

SessionOp op(OpId id, OpPayload p, ClientId cid = "a", std::int64_t t = 0) {
  return SessionOp{id, std::move(cid), t ? t : static_cast<std::int64_t>(1000 + id), std::move(p)};
}

Transform translation(double x, double y = 0, double z = 0) { return Transform::from_translation(Vec3(x, y, z)); }

std::string canon(const SessionState& s) { return canonical_serialize(s); }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Nodes named by node-scoped ops, including those inside slide snapshots.
void touched_nodes(const OpList& log, std::set<SessionNodeId>& out) {
  for (const SessionOp& o : log) {
    if (const auto* p = std::get_if<TransformNode>(&o.payload)) out.insert(p->node);
    if (const auto* p = std::get_if<SetNodeVisibility>(&o.payload)) out.insert(p->node);
    if (const auto* p = std::get_if<NudgeTransform>(&o.payload); p && p->node) out.insert(*p->node);
    if (const auto* p = std::get_if<CreateSlide>(&o.payload); p && p->snapshot) touched_nodes(*p->snapshot, out);
  }
}

void check_squash_properties(const OpList& log) {
  const SessionState full = fold(log);
  const OpList sq = squash(log);
  CHECK(canon(fold(sq)) == canon(full));
  std::set<SessionNodeId> touched;
  touched_nodes(log, touched);
  CHECK(sq.size() <= 3 + 2 * touched.size() + full.slides.size() + 1);
  const OpList again = squash(sq);
  CHECK(ops_to_json(again) == ops_to_json(sq));
  for (std::size_t i = 0; i < sq.size(); ++i) {
    CHECK(sq[i].op_id == i + 1);
    CHECK_FALSE(is_ephemeral(sq[i]));
  }
}

}  // namespace

TEST_CASE("POI place and clear") {
  SessionState s;
  apply_op(s, op(1, PlacePoi{Vec3(1, 2, 3), 4u}));
  REQUIRE(s.poi);
  CHECK(s.poi->position == Vec3(1, 2, 3));
  CHECK(s.poi->placer == "a");
  CHECK(s.poi->anchor == 4u);
  apply_op(s, op(2, ClearPoi{}));
  CHECK_FALSE(s.poi);
}

TEST_CASE("last writer wins per node") {
  const SessionState s = fold({op(1, TransformNode{7, translation(1)}, "a"), op(2, TransformNode{7, translation(2)}, "b")});
  REQUIRE(s.node_transforms.size() == 1);
  CHECK(s.node_transforms.at(7).value.translation == Vec3(2, 0, 0));
  CHECK(s.node_transforms.at(7).stamp.cid == "b");
}

TEST_CASE("nudges compose and respect the axis constraint") {
  SessionState s;
  apply_op(s, op(1, NudgeTransform{std::nullopt, NudgeAxis::kY, Vec3(1, 2, 3)}));
  apply_op(s, op(2, NudgeTransform{std::nullopt, NudgeAxis::kFree, Vec3(1, 1, 1)}));
  CHECK(s.whole().translation == Vec3(1, 3, 1));
  apply_op(s, op(3, TransformNode{2, translation(5)}));
  apply_op(s, op(4, NudgeTransform{2u, NudgeAxis::kX, Vec3(0.5, 9, 9)}));
  CHECK(s.node_transforms.at(2).value.translation == Vec3(5.5, 0, 0));
  apply_op(s, op(5, TransformNode{2, translation(-1)}));
  CHECK(s.node_transforms.at(2).value.translation == Vec3(-1, 0, 0));
}

TEST_CASE("scale factors and presets") {
  SessionState s;
  apply_op(s, op(1, SetScale{1.0, "tenth"}));
  CHECK(s.whole().scale == Vec3::Constant(0.1));
  apply_op(s, op(2, SetScale{2.5, ""}));
  CHECK(s.whole().scale == Vec3::Constant(2.5));
  CHECK_FALSE(apply_op(s, op(3, SetScale{1.0, "giant"})).warning.empty());
  CHECK_FALSE(apply_op(s, op(4, SetScale{-1.0, ""})).warning.empty());
  CHECK(s.whole().scale == Vec3::Constant(2.5));
  CHECK(scale_preset("half") == 0.5);
  CHECK(scale_preset("hundredth") == 0.01);
}

TEST_CASE("switching the model clears node state") {
  SessionState s = fold({op(1, SetActiveModel{"m1"}), op(2, TransformNode{1, translation(1)}),
                         op(3, SetNodeVisibility{2, false}), op(4, SetActiveModel{"m2"})});
  CHECK(s.active_model == "m2");
  CHECK(s.node_transforms.empty());
  CHECK(s.node_visibility.empty());
}

TEST_CASE("cut plane enable and disable") {
  SessionState s;
  apply_op(s, op(1, SetCutPlane{Axis::kZ, 0.25, true}));
  REQUIRE(s.cut_plane);
  CHECK(s.cut_plane->axis == Axis::kZ);
  apply_op(s, op(2, SetCutPlane{Axis::kZ, 0.0, false}));
  CHECK_FALSE(s.cut_plane);
}

TEST_CASE("op ids must increase except for poses") {
  SessionState s;
  apply_op(s, op(5, PlacePoi{}));
  const std::string before = canonical_serialize(s, {true, true});
  CHECK_THROWS_AS(apply_op(s, op(5, ClearPoi{})), ProtocolError);
  CHECK_THROWS_AS(apply_op(s, op(4, ClearPoi{})), ProtocolError);
  CHECK(canonical_serialize(s, {true, true}) == before);
  apply_op(s, op(5, ParticipantPose{Pose{}}, "h"));
  CHECK(s.participants.count("h") == 1);
  CHECK_THROWS_AS(apply_op(s, op(4, ParticipantPose{Pose{}}, "h")), ProtocolError);
}

TEST_CASE("stale nodes are ignored with a warning") {
  ApplyContext ctx;
  ctx.node_exists = [](const std::string&, SessionNodeId n) { return n < 10; };
  SessionState s;
  CHECK(apply_op(s, op(1, TransformNode{3, translation(1)}), &ctx).warning.empty());
  CHECK_FALSE(apply_op(s, op(2, TransformNode{30, translation(1)}), &ctx).warning.empty());
  CHECK_FALSE(apply_op(s, op(3, SetNodeVisibility{30, false}), &ctx).warning.empty());
  CHECK(s.node_transforms.size() == 1);
  CHECK(s.node_visibility.empty());
  CHECK(s.last_op_id == 3);
}

TEST_CASE("slides capture, restore and delete") {
  SessionState s;
  apply_op(s, op(1, SetActiveModel{"m"}));
  apply_op(s, op(2, TransformNode{1, translation(1)}));
  apply_op(s, op(3, Join{"hl", ClientKind::kHeadset}, "h"));
  apply_op(s, op(4, CreateSlide{"s1", "first", nullptr}));
  const std::string at_slide = canon(s);
  apply_op(s, op(5, TransformNode{1, translation(9)}));
  apply_op(s, op(6, SetNodeVisibility{3, false}));
  apply_op(s, op(7, PlacePoi{Vec3(1, 1, 1)}));
  apply_op(s, op(8, LoadSlide{"s1"}));
  CHECK(canon(s) == at_slide);
  CHECK(s.participants.count("h") == 1);
  CHECK_FALSE(apply_op(s, op(9, LoadSlide{"nope"})).warning.empty());
  apply_op(s, op(10, DeleteSlide{"s1"}));
  CHECK(s.slides.empty());
  CHECK_FALSE(apply_op(s, op(11, DeleteSlide{"s1"})).warning.empty());
  CHECK_THROWS_AS(load_slide(s, "s1"), Error);
}

TEST_CASE("squash hand cases") {
  const Transform t2 = translation(2);
  const OpList sq = squash({op(1, TransformNode{4, translation(1)}), op(2, TransformNode{4, t2})});
  REQUIRE(sq.size() == 1);
  CHECK(sq[0].op_id == 1);
  const auto& tn = std::get<TransformNode>(sq[0].payload);
  CHECK(tn.node == 4);
  CHECK(tn.transform.translation == t2.translation);

  CHECK(squash({op(1, PlacePoi{}), op(2, ClearPoi{})}).size() <= 1);
  CHECK(canon(fold(squash({op(1, PlacePoi{}), op(2, ClearPoi{})}))) == canon(fold({op(1, PlacePoi{}), op(2, ClearPoi{})})));
  CHECK(squash({op(1, ParticipantPose{}, "h"), op(1, ParticipantPose{}, "h")}).empty());
  CHECK(squash({}).empty());
  CHECK_THROWS_AS(squash({op(2, ClearPoi{}), op(1, ClearPoi{})}), ProtocolError);
}

TEST_CASE("squash properties on random logs") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    RandomOpOptions o;
    o.include_poses = seed % 2 == 0;
    RandomOpSource src(seed, o);
    const std::size_t len = 10 + (seed * 7919) % 3000;
    check_squash_properties(src.log(len));
  }
}

TEST_CASE("squash bound with many slides") {
  RandomOpOptions o;
  o.node_count = 20;
  RandomOpSource src(99, o);
  const OpList log = src.log(10'000);
  const SessionState s = fold(log);
  const OpList sq = squash(log);
  CHECK(sq.size() <= 3 + 40 + s.slides.size() + 1);
  check_squash_properties(log);
}

TEST_CASE("state_to_ops rebuilds the state") {
  RandomOpSource src(3);
  const SessionState s = fold(src.log(500));
  CHECK(canon(fold(state_to_ops(s))) == canon(s));
  const OpList bare = state_to_ops(s, false);
  CHECK(fold(bare).slides.empty());
  for (std::size_t i = 0; i < bare.size(); ++i) CHECK(bare[i].op_id == i + 1);
}

TEST_CASE("late join reaches the live state") {
  RandomOpOptions o;
  o.include_poses = true;
  RandomOpSource src(11, o);
  OpList log = src.log(800, {"a", "b", "h1", "h2"});
  // Joins first, then h2 leaves halfway.
  OpList full;
  OpId next = 1;
  full.push_back(op(next++, Join{"A", ClientKind::kWeb}, "a"));
  full.push_back(op(next++, Join{"H1", ClientKind::kHeadset}, "h1"));
  full.push_back(op(next++, Join{"H2", ClientKind::kHeadset}, "h2"));
  for (std::size_t i = 0; i < log.size(); ++i) {
    SessionOp o2 = log[i];
    if (i == 400) full.push_back(op(next++, Leave{}, "h2"));
    if (is_ephemeral(o2)) {
      o2.op_id = next - 1;
      if (o2.client_id == "h2" && i >= 400) continue;
    } else {
      o2.op_id = next++;
    }
    full.push_back(o2);
  }
  const SessionState live = fold(full);
  const CanonicalOptions with{true, false};
  const OpList bundle = late_join_bundle(full);
  CHECK(canonical_serialize(fold(bundle), with) == canonical_serialize(live, with));
  CHECK(canonical_serialize(fold(late_join_bundle(live)), with) == canonical_serialize(live, with));
  CHECK(live.participants.size() == 3);
  CHECK(live.participants.count("h2") == 0);
}

TEST_CASE("wire round trip is exact") {
  RandomOpOptions o;
  o.include_poses = true;
  RandomOpSource src(21, o);
  OpList log = src.log(2000);
  log.push_back(op(5000, Join{"x y", ClientKind::kHeadset}, "c\"1"));
  log.push_back(op(5001, Leave{}, "c\"1"));
  log.push_back(op(5002, SetScale{0.1 + 0.2, "half"}));
  for (const SessionOp& a : log) {
    const SessionOp b = decode_op(encode_op(a));
    CHECK(encode_op(b) == encode_op(a));
    CHECK(b.op_id == a.op_id);
    CHECK(b.client_id == a.client_id);
    CHECK(b.wall_time == a.wall_time);
    CHECK(op_type(b.payload) == op_type(a.payload));
  }
  CHECK(canon(fold(ops_from_json(ops_to_json(log)))) == canon(fold(log)));
  const SessionOp tn = decode_op(encode_op(op(1, TransformNode{1, translation(0.1 + 0.2)})));
  CHECK(std::get<TransformNode>(tn.payload).transform.translation.x() == 0.1 + 0.2);
}

TEST_CASE("wire format shape and errors") {
  const auto j = nlohmann::json::parse(encode_op(op(3, PlacePoi{Vec3(1, 2, 3)}, "web-1", 1700)));
  CHECK(j["v"] == 1);
  CHECK(j["op"] == 3);
  CHECK(j["cid"] == "web-1");
  CHECK(j["t"] == 1700);
  CHECK(j["type"] == "place_poi");
  CHECK(j["body"].is_object());

  const SessionOp client = decode_op(R"({"v":1,"type":"clear_poi","body":{}})");
  CHECK(client.op_id == 0);
  CHECK(client.client_id.empty());
  CHECK_THROWS_AS(decode_op(R"({"v":2,"type":"clear_poi","body":{}})"), ProtocolError);
  CHECK_THROWS_AS(decode_op(R"({"v":1,"type":"warp","body":{}})"), ProtocolError);
  CHECK_THROWS_AS(decode_op(R"({"v":1,"type":"transform_node","body":{"node":"x"}})"), ProtocolError);
  CHECK_THROWS_AS(decode_op("not json"), ProtocolError);
}

TEST_CASE("server frames") {
  const OpList ops{op(1, PlacePoi{}), op(2, ClearPoi{})};
  const ServerFrame sync = decode_server_frame(encode_sync(2, ops, "web-7"));
  CHECK(sync.kind == FrameKind::kSync);
  CHECK(sync.watermark == 2);
  CHECK(sync.cid == "web-7");
  CHECK(sync.ops.size() == 2);
  const ServerFrame err = decode_server_frame(encode_error("stale", "too old"));
  CHECK(err.kind == FrameKind::kError);
  CHECK(err.code == "stale");
  CHECK(err.message == "too old");
  const ServerFrame plain = decode_server_frame(encode_op(ops[0]));
  CHECK(plain.kind == FrameKind::kOp);
  CHECK(plain.op.op_id == 1);
}

TEST_CASE("canonical serialization") {
  SessionState a = fold({op(1, TransformNode{1, translation(1)}, "a", 5), op(2, SetNodeVisibility{2, false}, "b", 6)});
  SessionState b = fold({op(1, SetNodeVisibility{2, false}, "b", 6), op(2, TransformNode{1, translation(1)}, "a", 5)});
  CHECK(canon(a) == canon(b));
  CHECK(canonical_serialize(a, {false, true}) != canon(a));

  SessionState z = fold({op(1, TransformWhole{translation(-0.0, 0.1)})});
  const std::string text = canon(z);
  CHECK(text.find("-0.000000000") == std::string::npos);
  CHECK(text.find("0.100000000") != std::string::npos);
  const auto parsed = nlohmann::json::parse(text);
  std::vector<std::string> keys;
  for (const auto& [k, v] : parsed.items()) keys.push_back(k);
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  CHECK(text.find(' ') == std::string::npos);

  CHECK(state_hash(a) == fnv1a_hex(canon(a)));
  CHECK(state_hash(a).size() == 16);
  SessionState with_people = a;
  apply_op(with_people, op(3, Join{"x", ClientKind::kWeb}, "x"));
  CHECK(state_hash(with_people) == state_hash(a));
}

TEST_CASE("random op source is seeded") {
  CHECK(ops_to_json(RandomOpSource(5).log(300)) == ops_to_json(RandomOpSource(5).log(300)));
  CHECK(ops_to_json(RandomOpSource(5).log(300)) != ops_to_json(RandomOpSource(6).log(300)));
}
