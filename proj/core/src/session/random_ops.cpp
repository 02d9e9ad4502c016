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

#include <algorithm>
#include <cmath>

namespace orbitcad::session {

RandomOpSource::RandomOpSource(std::uint64_t seed, RandomOpOptions options)
    : rng_(seed), options_(std::move(options)) {}

double RandomOpSource::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

Vec3 RandomOpSource::vec(double extent) {
  return {uniform(-extent, extent), uniform(-extent, extent), uniform(-extent, extent)};
}

Quat RandomOpSource::rotation() {
  std::normal_distribution<double> n;
  Quat q(n(rng_), n(rng_), n(rng_), n(rng_));
  q.normalize();
  return q;
}

SessionNodeId RandomOpSource::node() {
  return std::uniform_int_distribution<SessionNodeId>(1, std::max<SessionNodeId>(options_.node_count, 1))(rng_);
}

OpPayload RandomOpSource::next_payload() {
  for (;;) {
    const int pick = std::uniform_int_distribution<int>(0, 99)(rng_);
    if (pick < 25) {
      Transform t;
      t.translation = vec(2.0);
      t.rotation = rotation();
      return TransformNode{node(), t};
    }
    if (pick < 40) {
      NudgeTransform n;
      if (pick % 3 != 0) n.node = node();
      n.axis = static_cast<NudgeAxis>(std::uniform_int_distribution<int>(0, 3)(rng_));
      n.delta = vec(0.1);
      return n;
    }
    if (pick < 52) return SetNodeVisibility{node(), uniform(0, 1) < 0.5};
    if (pick < 58) {
      Transform t;
      t.translation = vec(1.0);
      t.rotation = rotation();
      return TransformWhole{t};
    }
    if (pick < 63) {
      static const char* presets[] = {"full", "half", "tenth", "hundredth"};
      if (uniform(0, 1) < 0.5) return SetScale{1.0, presets[std::uniform_int_distribution<int>(0, 3)(rng_)]};
      return SetScale{uniform(0.01, 2.0), ""};
    }
    if (pick < 70) {
      return SetCutPlane{static_cast<Axis>(std::uniform_int_distribution<int>(0, 2)(rng_)), uniform(-1, 1),
                         uniform(0, 1) < 0.7};
    }
    if (pick < 78) {
      PlacePoi p{vec(1.0), std::nullopt};
      if (uniform(0, 1) < 0.5) p.anchor = node();
      return p;
    }
    if (pick < 81) return ClearPoi{};
    if (pick < 83 && !options_.models.empty()) {
      return SetActiveModel{
          options_.models[std::uniform_int_distribution<std::size_t>(0, options_.models.size() - 1)(rng_)]};
    }
    if (pick < 90 && options_.include_slides) {
      const int s = std::uniform_int_distribution<int>(0, 9)(rng_);
      if (s < 4 || slides_.empty()) {
        std::string id = options_.slide_prefix + std::to_string(slide_counter_++ % 8);
        if (std::find(slides_.begin(), slides_.end(), id) == slides_.end()) slides_.push_back(id);
        return CreateSlide{id, "slide " + id, nullptr};
      }
      const std::string& id = slides_[std::uniform_int_distribution<std::size_t>(0, slides_.size() - 1)(rng_)];
      if (s < 9) return LoadSlide{id};
      DeleteSlide d{id};
      slides_.erase(std::find(slides_.begin(), slides_.end(), id));
      return d;
    }
    if (pick >= 90 && options_.include_poses) {
      return ParticipantPose{Pose{rotation(), vec(3.0)}};
    }
  }
}

OpList RandomOpSource::log(std::size_t count, const std::vector<ClientId>& clients) {
  OpList out;
  out.reserve(count);
  std::int64_t t = 1'700'000'000'000;
  for (std::size_t i = 0; i < count; ++i) {
    SessionOp op;
    op.op_id = i + 1;
    op.client_id = clients[std::uniform_int_distribution<std::size_t>(0, clients.size() - 1)(rng_)];
    t += std::uniform_int_distribution<int>(0, 50)(rng_);
    op.wall_time = t;
    op.payload = next_payload();
    if (is_ephemeral(op)) op.op_id = i;  // poses carry the current watermark
    out.push_back(std::move(op));
  }
  return out;
}

}  // namespace orbitcad::session
