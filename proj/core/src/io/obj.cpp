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

#include "formats.hpp"

#include "../common/bytes.hpp"
#include "orbitcad/error.hpp"

#include <charconv>
#include <string>
#include <string_view>

namespace orbitcad::io::detail {

namespace {

struct ObjGroup {
  std::string name;
  std::vector<Triangle> faces;  // global (0-based) vertex indices
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view next_token(std::string_view& s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  std::size_t n = 0;
  while (n < s.size() && !is_space(s[n])) ++n;
  auto tok = s.substr(0, n);
  s.remove_prefix(n);
  return tok;
}

double parse_number(std::string_view tok, std::size_t line) {
  double v = 0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("invalid number '" + std::string(tok) + "'", line, 0);
  }
  return v;
}

std::uint32_t parse_index(std::string_view tok, std::size_t vertex_count, std::size_t line) {
  // Only the position index (before the first '/') matters.
  auto slash = tok.find('/');
  auto head = tok.substr(0, slash);
  long long idx = 0;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0) {
    throw ParseError("invalid face index '" + std::string(tok) + "'", line, 0);
  }
  long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertex_count) + idx;
  if (resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
    throw ParseError("face index " + std::to_string(idx) + " out of range", line, 0);
  }
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

ImportResult import_obj(std::span<const std::byte> bytes, const ImportOptions&) {
  std::string_view text = as_chars(bytes);
  std::vector<Vec3> vertices;
  std::vector<ObjGroup> groups;
  ImportResult result;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<std::uint32_t> poly;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::string_view rest = line;
    std::string_view key = next_token(rest);
    if (key == "v") {
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        auto tok = next_token(rest);
        if (tok.empty()) throw ParseError("vertex needs three coordinates", line_no, 0);
        p[k] = parse_number(tok, line_no);
      }
      vertices.push_back(p);
    } else if (key == "f") {
      poly.clear();
      for (auto tok = next_token(rest); !tok.empty(); tok = next_token(rest)) {
        poly.push_back(parse_index(tok, vertices.size(), line_no));
      }
      if (poly.size() < 3) throw ParseError("face needs at least three vertices", line_no, 0);
      if (groups.empty()) groups.push_back({"unnamed", {}});
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        groups.back().faces.push_back({poly[0], poly[k], poly[k + 1]});
      }
    } else if (key == "g" || key == "o") {
      std::string name(trim(rest));
      groups.push_back({name.empty() ? std::string("unnamed") : name, {}});
    }
    // vt, vn, vp, s, usemtl, mtllib, l, p carry nothing this importer keeps.
  }

  std::erase_if(groups, [](const ObjGroup& g) { return g.faces.empty(); });
  SceneModel& model = result.model;
  if (groups.empty()) {
    model.add_node("unnamed", std::nullopt);
    return result;
  }
  std::optional<NodeId> root;
  if (groups.size() > 1) root = model.add_node("root", std::nullopt);
  std::vector<std::uint32_t> remap(vertices.size(), UINT32_MAX);
  for (auto& g : groups) {
    std::vector<Vec3> local;
    std::vector<std::uint32_t> touched;
    for (auto& t : g.faces) {
      for (auto& v : t) {
        if (remap[v] == UINT32_MAX) {
          remap[v] = static_cast<std::uint32_t>(local.size());
          local.push_back(vertices[v]);
          touched.push_back(v);
        }
        v = remap[v];
      }
    }
    for (auto v : touched) remap[v] = UINT32_MAX;
    MeshId mesh = model.add_mesh(Mesh(std::move(local), std::move(g.faces)));
    model.add_node(g.name, root, Transform{}, mesh);
  }
  return result;
}

ExportResult export_obj(const SceneModel& model) {
  ExportResult result;
  std::string out = "# orbitcad OBJ export\n";
  std::size_t base = 1;
  for (const FlatEntry& e : flatten(model)) {
    BakedMesh baked = bake_node(model, e);
    const SceneNode& node = model.node(e.node);
    out += "o " + (node.name.empty() ? "node_" + std::to_string(to_underlying(node.id)) : node.name) + "\n";
    for (const Vec3& p : baked.positions) {
      out += "v " + format_double(p.x()) + " " + format_double(p.y()) + " " + format_double(p.z()) + "\n";
    }
    for (const Triangle& t : baked.triangles) {
      out += "f " + std::to_string(t[0] + base) + " " + std::to_string(t[1] + base) + " " +
             std::to_string(t[2] + base) + "\n";
    }
    base += baked.positions.size();
  }
  if (model.unit_scale() != 1.0) {
    result.warnings.push_back("OBJ has no unit field; coordinates written in model units");
  }
  auto b = as_bytes(out);
  result.bytes.assign(b.begin(), b.end());
  return result;
}

}  // namespace orbitcad::io::detail
