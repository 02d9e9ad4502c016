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

#include <random>
#include <set>

namespace orbitcad::session {

struct RandomOpOptions {
  SessionNodeId node_count = 20;
  /// Candidate models for SetActiveModel; empty disables the op.
  std::vector<std::string> models = {"model-a", "model-b"};
  bool include_slides = true;
  bool include_poses = false;
  /// Prefix of generated slide ids, so concurrent generators do not collide.
  std::string slide_prefix = "s";
};

/// Seeded stream of plausible session edits.
class RandomOpSource {
 public:
  RandomOpSource(std::uint64_t seed, RandomOpOptions options = {});

  OpPayload next_payload();
  /// `count` ops numbered 1..count with the given client ids cycled randomly.
  OpList log(std::size_t count, const std::vector<ClientId>& clients = {"a", "b", "c"});

  std::mt19937_64& rng() { return rng_; }

 private:
  double uniform(double lo, double hi);
  Vec3 vec(double extent);
  Quat rotation();
  SessionNodeId node();

  std::mt19937_64 rng_;
  RandomOpOptions options_;
  std::vector<std::string> slides_;
  std::uint64_t slide_counter_ = 0;
};

}  // namespace orbitcad::session
