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

#include "orbitcad/scene/model.hpp"
#include "orbitcad/scene/synthetic.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace orbitcad::testing {

inline Mesh unit_cube() { return box_mesh(Vec3(0.5, 0.5, 0.5)); }

inline Transform random_transform(std::mt19937_64& rng, double extent = 1.0, bool scaled = false) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::normal_distribution<double> n;
  Transform t;
  t.translation = Vec3(u(rng), u(rng), u(rng));
  t.rotation = Quat(n(rng), n(rng), n(rng), n(rng)).normalized();
  if (scaled) {
    std::uniform_real_distribution<double> s(0.5, 2.0);
    const double k = s(rng);
    t.scale = Vec3(k, k, k);
  }
  return t;
}

/// Random tree of `count` nodes; roughly two thirds carry one of a few
/// shared meshes.
inline SceneModel random_tree(std::mt19937_64& rng, int count, bool scaled = false) {
  SceneModel m("random");
  std::vector<MeshId> meshes{m.add_mesh(unit_cube()), m.add_mesh(cylinder(8, 0.2, 0.5)),
                             m.add_mesh(grid_surface(3, 2, 0.4, 0.3, 0.05))};
  std::vector<NodeId> ids;
  ids.push_back(m.add_node("root", std::nullopt, random_transform(rng, 0.5, scaled)));
  for (int i = 1; i < count; ++i) {
    const NodeId parent = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
    std::optional<MeshId> mesh;
    if (std::uniform_int_distribution<int>(0, 2)(rng) != 0) {
      mesh = meshes[std::uniform_int_distribution<std::size_t>(0, meshes.size() - 1)(rng)];
    }
    ids.push_back(m.add_node("n" + std::to_string(i), parent, random_transform(rng, 1.0, scaled), mesh));
  }
  return m;
}

/// Deletes the directory on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "orbitcad-test") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace orbitcad::testing
