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

#include "orbitcad/scene/synthetic.hpp"

#include "orbitcad/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace orbitcad {

Mesh grid_surface(int nx, int ny, double size_x, double size_y, double amplitude) {
  if (nx < 1 || ny < 1) throw InvalidArgument("grid_surface needs at least one cell per axis");
  std::vector<Vec3> pos;
  pos.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double u = static_cast<double>(i) / nx, v = static_cast<double>(j) / ny;
      const double z = amplitude * std::sin(2 * std::numbers::pi * u) * std::cos(3 * std::numbers::pi * v);
      pos.emplace_back((u - 0.5) * size_x, (v - 0.5) * size_y, z);
    }
  }
  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(2) * nx * ny);
  const auto at = [nx](int i, int j) { return static_cast<std::uint32_t>(j * (nx + 1) + i); };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      tris.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      tris.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  return Mesh(std::move(pos), std::move(tris));
}

Mesh cylinder(int segments, double radius, double height) {
  if (segments < 3) throw InvalidArgument("cylinder needs at least 3 segments");
  std::vector<Vec3> pos;
  for (int k = 0; k < segments; ++k) {
    const double a = 2 * std::numbers::pi * k / segments;
    pos.emplace_back(radius * std::cos(a), radius * std::sin(a), 0.0);
    pos.emplace_back(radius * std::cos(a), radius * std::sin(a), height);
  }
  const auto bottom = static_cast<std::uint32_t>(pos.size());
  pos.emplace_back(0.0, 0.0, 0.0);
  pos.emplace_back(0.0, 0.0, height);
  const std::uint32_t top = bottom + 1;
  std::vector<Triangle> tris;
  for (int k = 0; k < segments; ++k) {
    const auto b0 = static_cast<std::uint32_t>(2 * k), t0 = b0 + 1;
    const auto b1 = static_cast<std::uint32_t>(2 * ((k + 1) % segments)), t1 = b1 + 1;
    tris.push_back({b0, b1, t1});
    tris.push_back({b0, t1, t0});
    tris.push_back({bottom, b1, b0});
    tris.push_back({top, t0, t1});
  }
  return Mesh(std::move(pos), std::move(tris));
}

Mesh box_mesh(const Vec3& h, int subdiv) {
  if (subdiv < 1) throw InvalidArgument("box_mesh needs subdiv >= 1");
  std::vector<Vec3> pos;
  std::vector<Triangle> tris;
  // Each face: origin corner plus two edge vectors, wound outward.
  const std::array<std::array<Vec3, 3>, 6> faces{{
      {Vec3(h.x(), -h.y(), -h.z()), Vec3(0, 2 * h.y(), 0), Vec3(0, 0, 2 * h.z())},
      {Vec3(-h.x(), -h.y(), -h.z()), Vec3(0, 0, 2 * h.z()), Vec3(0, 2 * h.y(), 0)},
      {Vec3(-h.x(), h.y(), -h.z()), Vec3(0, 0, 2 * h.z()), Vec3(2 * h.x(), 0, 0)},
      {Vec3(-h.x(), -h.y(), -h.z()), Vec3(2 * h.x(), 0, 0), Vec3(0, 0, 2 * h.z())},
      {Vec3(-h.x(), -h.y(), h.z()), Vec3(2 * h.x(), 0, 0), Vec3(0, 2 * h.y(), 0)},
      {Vec3(-h.x(), -h.y(), -h.z()), Vec3(0, 2 * h.y(), 0), Vec3(2 * h.x(), 0, 0)},
  }};
  for (const auto& f : faces) {
    const auto base = static_cast<std::uint32_t>(pos.size());
    for (int j = 0; j <= subdiv; ++j) {
      for (int i = 0; i <= subdiv; ++i) {
        pos.push_back(f[0] + f[1] * (static_cast<double>(i) / subdiv) + f[2] * (static_cast<double>(j) / subdiv));
      }
    }
    const auto at = [&](int i, int j) { return base + static_cast<std::uint32_t>(j * (subdiv + 1) + i); };
    for (int j = 0; j < subdiv; ++j) {
      for (int i = 0; i < subdiv; ++i) {
        tris.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
        tris.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
      }
    }
  }
  return Mesh(std::move(pos), std::move(tris));
}

SceneModel synthetic_assembly(const SyntheticAssemblySpec& spec) {
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  SceneModel m("synthetic");
  const NodeId root = m.add_node("assembly", std::nullopt);
  m.mutable_node(root).node_type = "assembly";

  const MeshId bolt = m.add_mesh(cylinder(24, 0.004, 0.03));
  const MeshId washer = m.add_mesh(cylinder(32, 0.008, 0.002));
  const MeshId bracket = m.add_mesh(box_mesh(Vec3(0.05, 0.03, 0.02), 20));
  SyntheticAssemblySpec counts = spec;
  const std::uint64_t full_small = 96ull * spec.bolts + 128ull * spec.washers + 4800ull * spec.brackets;
  if (full_small > 0 && 2 * full_small > spec.target_triangles) {
    // Small targets: shrink the part counts so panels still dominate.
    const double f = static_cast<double>(spec.target_triangles) / static_cast<double>(2 * full_small);
    counts.bolts = static_cast<int>(spec.bolts * f);
    counts.washers = static_cast<int>(spec.washers * f);
    counts.brackets = static_cast<int>(spec.brackets * f);
  }
  const std::uint64_t small = 96ull * counts.bolts + 128ull * counts.washers + 4800ull * counts.brackets;
  const std::uint64_t panel_budget = spec.target_triangles > small ? spec.target_triangles - small : 0;

  const int groups = std::max(1, spec.panels / 3);
  std::vector<NodeId> subs;
  for (int g = 0; g < groups; ++g) {
    NodeId s = m.add_node("subassembly_" + std::to_string(g), root,
                          Transform::from_translation(Vec3(1.2 * g, 0, 0)));
    m.mutable_node(s).node_type = "assembly";
    subs.push_back(s);
  }
  auto pick = [&] { return subs[std::uniform_int_distribution<std::size_t>(0, subs.size() - 1)(rng)]; };
  auto place = [&](const std::string& name, const std::string& type, MeshId mesh, NodeId parent, double spread) {
    Transform t;
    t.translation = Vec3(uniform(-spread, spread), uniform(-spread, spread), uniform(-spread, spread));
    NodeId n = m.add_node(name, parent, t, mesh);
    m.mutable_node(n).node_type = type;
  };

  if (spec.panels > 0 && panel_budget > 0) {
    // One shared panel mesh plus a filler strip so the total is exact.
    const std::uint64_t per_panel = panel_budget / static_cast<std::uint64_t>(spec.panels);
    const int side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(per_panel) / 2.0)));
    const std::uint64_t panel_tris = 2ull * side * side;
    const MeshId panel = m.add_mesh(grid_surface(side, side, 1.0, 0.8, 0.02));
    for (int p = 0; p < spec.panels; ++p) {
      Transform t;
      t.translation = Vec3(0, 0, 0.3 * (p % 3) - 0.3);
      NodeId n = m.add_node("panel_" + std::to_string(p), subs[static_cast<std::size_t>(p) % subs.size()], t, panel);
      m.mutable_node(n).node_type = "panel";
    }
    std::uint64_t rest = panel_budget - panel_tris * static_cast<std::uint64_t>(spec.panels);
    if (rest >= 2) {
      NodeId n = m.add_node("filler_plate", root, {}, m.add_mesh(grid_surface(static_cast<int>(rest / 2), 1, 1.0, 0.05)));
      m.mutable_node(n).node_type = "panel";
      rest %= 2;
    }
    if (rest == 1) {
      NodeId n = m.add_node("shim", root, {},
                            m.add_mesh(Mesh({Vec3(0, 0, 0), Vec3(0.01, 0, 0), Vec3(0, 0.01, 0)}, {Triangle{0, 1, 2}})));
      m.mutable_node(n).node_type = "panel";
    }
  }
  for (int i = 0; i < counts.brackets; ++i) place("bracket_" + std::to_string(i), "bracket", bracket, pick(), 0.4);
  for (int i = 0; i < counts.bolts; ++i) place("bolt_" + std::to_string(i), "fastener", bolt, pick(), 0.45);
  for (int i = 0; i < counts.washers; ++i) place("washer_" + std::to_string(i), "fastener", washer, pick(), 0.45);
  return m;
}

}  // namespace orbitcad
