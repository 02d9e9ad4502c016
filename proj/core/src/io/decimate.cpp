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

#include "orbitcad/io/model_io.hpp"

#include "orbitcad/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace orbitcad::io {

namespace {

using Quadric = Eigen::Matrix4d;

constexpr double kBoundaryWeight = 100.0;
// Minimum cosine between a face normal before and after a collapse.
constexpr double kFoldCos = 0.2;

double quadric_error(const Quadric& q, const Vec3& p) {
  Eigen::Vector4d h(p.x(), p.y(), p.z(), 1.0);
  return std::max(0.0, h.dot(q * h));
}

Quadric plane_quadric(const Vec3& n, double d, double weight) {
  Eigen::Vector4d p(n.x(), n.y(), n.z(), d);
  return weight * (p * p.transpose());
}

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{a} << 32) | b;
}

/// Garland-Heckbert edge collapse restricted to endpoint placement, so no
/// vertex is ever created and every level indexes the original positions.
class Decimator {
 public:
  Decimator(const std::vector<Vec3>& positions, const std::vector<Triangle>& triangles)
      : pos_(positions),
        tris_(triangles),
        alive_(triangles.size(), true),
        adj_(positions.size()),
        quadric_(positions.size(), Quadric::Zero()),
        dead_vertex_(positions.size(), false),
        version_(positions.size(), 0) {
    std::unordered_map<std::uint64_t, int> edge_uses;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      const Triangle& tri = tris_[t];
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
        alive_[t] = false;
        continue;
      }
      ++alive_count_;
      for (auto v : tri) adj_[v].push_back(static_cast<std::uint32_t>(t));
      Vec3 n = (pos_[tri[1]] - pos_[tri[0]]).cross(pos_[tri[2]] - pos_[tri[0]]);
      double area2 = n.norm();
      for (int k = 0; k < 3; ++k) ++edge_uses[edge_key(tri[k], tri[(k + 1) % 3])];
      if (area2 <= 0) continue;
      n /= area2;
      Quadric q = plane_quadric(n, -n.dot(pos_[tri[0]]), 0.5 * area2);
      for (auto v : tri) quadric_[v] += q;
    }
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!alive_[t]) continue;
      const Triangle& tri = tris_[t];
      Vec3 n = (pos_[tri[1]] - pos_[tri[0]]).cross(pos_[tri[2]] - pos_[tri[0]]);
      if (n.norm() <= 0) continue;
      n.normalize();
      for (int k = 0; k < 3; ++k) {
        std::uint32_t a = tri[k], b = tri[(k + 1) % 3];
        if (edge_uses[edge_key(a, b)] != 1) continue;
        Vec3 e = pos_[b] - pos_[a];
        Vec3 m = e.cross(n);
        if (m.norm() <= 0) continue;
        m.normalize();
        Quadric q = plane_quadric(m, -m.dot(pos_[a]), kBoundaryWeight * e.squaredNorm());
        quadric_[a] += q;
        quadric_[b] += q;
      }
    }
    std::vector<std::uint64_t> keys;
    keys.reserve(edge_uses.size());
    for (const auto& [k, n] : edge_uses) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (auto k : keys) push_edge(static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k));
  }

  void run_to(std::size_t target) {
    target = std::max<std::size_t>(target, 1);
    while (alive_count_ > target) {
      if (heap_.empty()) {
        if (force_) break;
        force_ = true;
        rebuild_heap();
        continue;
      }
      Candidate c = heap_.top();
      heap_.pop();
      if (dead_vertex_[c.keep] || dead_vertex_[c.drop]) continue;
      if (version_[c.keep] != c.keep_version || version_[c.drop] != c.drop_version) continue;
      if (!force_ && !valid(c.keep, c.drop)) continue;
      collapse(c.keep, c.drop);
    }
    // Last resort for pathological inputs: drop trailing triangles.
    for (std::size_t t = tris_.size(); t-- > 0 && alive_count_ > target;) {
      if (alive_[t]) {
        alive_[t] = false;
        --alive_count_;
      }
    }
  }

  std::vector<Triangle> snapshot() const {
    std::vector<Triangle> out;
    out.reserve(alive_count_);
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (alive_[t]) out.push_back(tris_[t]);
    }
    return out;
  }

 private:
  struct Candidate {
    double cost;
    std::uint32_t keep, drop;
    std::uint32_t keep_version, drop_version;
    bool operator<(const Candidate& o) const {
      if (cost != o.cost) return cost > o.cost;
      if (keep != o.keep) return keep > o.keep;
      return drop > o.drop;
    }
  };

  void push_edge(std::uint32_t a, std::uint32_t b) {
    Quadric q = quadric_[a] + quadric_[b];
    double to_b = quadric_error(q, pos_[b]);  // a removed, b kept
    double to_a = quadric_error(q, pos_[a]);
    std::uint32_t keep = b, drop = a;
    if (to_a < to_b || (to_a == to_b && a < b)) std::swap(keep, drop);
    heap_.push({std::min(to_a, to_b), keep, drop, version_[keep], version_[drop]});
  }

  void rebuild_heap() {
    heap_ = {};
    std::vector<std::uint64_t> keys;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!alive_[t]) continue;
      for (int k = 0; k < 3; ++k) keys.push_back(edge_key(tris_[t][k], tris_[t][(k + 1) % 3]));
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (auto k : keys) push_edge(static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k));
  }

  bool contains(const Triangle& t, std::uint32_t v) const { return t[0] == v || t[1] == v || t[2] == v; }

  std::vector<std::uint32_t> ring(std::uint32_t v) const {
    std::vector<std::uint32_t> out;
    for (auto t : adj_[v]) {
      if (!alive_[t]) continue;
      for (auto w : tris_[t]) {
        if (w != v) out.push_back(w);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool valid(std::uint32_t keep, std::uint32_t drop) const {
    std::size_t shared = 0;
    for (auto t : adj_[drop]) {
      if (alive_[t] && contains(tris_[t], keep)) ++shared;
    }
    if (shared == 0) return false;
    // Link condition: the two rings may only share the vertices opposite the edge.
    auto ra = ring(keep);
    auto rb = ring(drop);
    std::vector<std::uint32_t> common;
    std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(common));
    if (common.size() != shared) return false;

    for (auto t : adj_[drop]) {
      if (!alive_[t] || contains(tris_[t], keep)) continue;
      const Triangle& tri = tris_[t];
      Vec3 before = (pos_[tri[1]] - pos_[tri[0]]).cross(pos_[tri[2]] - pos_[tri[0]]);
      Vec3 p[3];
      for (int k = 0; k < 3; ++k) p[k] = pos_[tri[k] == drop ? keep : tri[k]];
      Vec3 after = (p[1] - p[0]).cross(p[2] - p[0]);
      double nb = before.norm(), na = after.norm();
      if (na <= 0) return false;
      if (nb > 0 && before.dot(after) < kFoldCos * nb * na) return false;
    }
    return true;
  }

  void collapse(std::uint32_t keep, std::uint32_t drop) {
    std::size_t killed = 0;
    for (auto t : adj_[drop]) {
      if (alive_[t] && contains(tris_[t], keep)) ++killed;
    }
    if (alive_count_ - killed < 1) return;
    for (auto t : adj_[drop]) {
      if (!alive_[t]) continue;
      Triangle& tri = tris_[t];
      if (contains(tri, keep)) {
        alive_[t] = false;
        --alive_count_;
        continue;
      }
      for (auto& v : tri) {
        if (v == drop) v = keep;
      }
      adj_[keep].push_back(t);
    }
    adj_[drop].clear();
    quadric_[keep] += quadric_[drop];
    dead_vertex_[drop] = true;
    ++version_[keep];
    auto& a = adj_[keep];
    std::erase_if(a, [&](std::uint32_t t) { return !alive_[t]; });
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    for (auto w : ring(keep)) push_edge(keep, w);
  }

  const std::vector<Vec3>& pos_;
  std::vector<Triangle> tris_;
  std::vector<bool> alive_;
  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<Quadric> quadric_;
  std::vector<bool> dead_vertex_;
  std::vector<std::uint32_t> version_;
  std::priority_queue<Candidate> heap_;
  std::size_t alive_count_ = 0;
  bool force_ = false;
};

}  // namespace

Mesh generate_lods(const Mesh& mesh, std::span<const double> ratios) {
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] > 0.0 && ratios[i] <= 1.0)) {
      throw InvalidArgument("LOD ratios must lie in (0, 1]");
    }
    if (i > 0 && !(ratios[i] < ratios[i - 1])) {
      throw InvalidArgument("LOD ratios must be strictly decreasing");
    }
  }
  Mesh out = mesh;
  const std::size_t full = mesh.triangle_count(0);
  std::vector<LodLevel> levels;
  if (full > 0) {
    Decimator dec(mesh.positions(), mesh.triangles());
    for (double r : ratios) {
      if (r == 1.0) continue;
      auto target = static_cast<std::size_t>(std::ceil(r * static_cast<double>(full) - 1e-9));
      dec.run_to(std::max<std::size_t>(target, 1));
      levels.push_back({dec.snapshot()});
    }
  } else {
    for (double r : ratios) {
      if (r != 1.0) levels.push_back({});
    }
  }
  out.set_lower_lods(std::move(levels));
  return out;
}

}  // namespace orbitcad::io
