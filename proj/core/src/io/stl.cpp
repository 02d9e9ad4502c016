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

#include <cctype>
#include "orbitcad/error.hpp"

#include <charconv>
#include <cstring>
#include <map>
#include <string>

namespace orbitcad::io::detail {

namespace {

/// Welds vertices with bit-identical coordinates so the mesh is indexed.
class Welder {
 public:
  std::uint32_t add(const Vec3& p) {
    auto [it, inserted] = index_.try_emplace(std::array{p.x(), p.y(), p.z()},
                                             static_cast<std::uint32_t>(positions_.size()));
    if (inserted) positions_.push_back(p);
    return it->second;
  }
  std::vector<Vec3> take() { return std::move(positions_); }

 private:
  std::map<std::array<double, 3>, std::uint32_t> index_;
  std::vector<Vec3> positions_;
};

bool looks_ascii(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  return text.substr(i, 5) == "solid";
}

ImportResult finish(std::string name, Welder& welder, std::vector<Triangle> tris) {
  ImportResult result;
  auto& model = result.model;
  MeshId mesh = model.add_mesh(Mesh(welder.take(), std::move(tris)));
  model.add_node(name.empty() ? "stl" : std::move(name), std::nullopt, Transform{}, mesh);
  return result;
}

ImportResult import_binary(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 84) r.fail("binary STL shorter than its 84-byte header");
  auto header = r.get_bytes(80);
  auto count = r.get<std::uint32_t>();
  std::size_t records = (bytes.size() - 84) / 50;
  if ((bytes.size() - 84) % 50 != 0 || records != count) {
    throw ParseError("binary STL header declares " + std::to_string(count) +
                         " triangles but the file holds " + std::to_string(records) + " records",
                     0, 80);
  }
  Welder welder;
  std::vector<Triangle> tris;
  tris.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    r.get_bytes(12);  // facet normal, recomputed on demand
    Triangle t;
    for (auto& v : t) {
      float x = r.get<float>(), y = r.get<float>(), z = r.get<float>();
      v = welder.add(Vec3(x, y, z));
    }
    r.get<std::uint16_t>();
    tris.push_back(t);
  }
  std::string name(as_chars(header));
  name = name.substr(0, name.find('\0'));
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
  if (name.rfind("solid", 0) == 0 || name.rfind("orbitcad", 0) == 0) name.clear();
  return finish(name, welder, std::move(tris));
}

ImportResult import_ascii(std::string_view text) {
  std::size_t line = 1;
  std::size_t pos = 0;
  auto next = [&]() -> std::string_view {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
      if (text[pos] == '\n') ++line;
      ++pos;
    }
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return text.substr(start, pos - start);
  };
  auto expect = [&](std::string_view want) {
    auto tok = next();
    if (tok != want) {
      throw ParseError("expected '" + std::string(want) + "' but found '" + std::string(tok) + "'", line, 0);
    }
  };
  auto number = [&]() {
    auto tok = next();
    double v = 0;
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      throw ParseError("invalid number '" + std::string(tok) + "'", line, 0);
    }
    return v;
  };

  expect("solid");
  std::size_t eol = text.find('\n', pos);
  std::string name(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.erase(0, 1);
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
  if (eol != std::string_view::npos) pos = eol;

  Welder welder;
  std::vector<Triangle> tris;
  std::vector<std::uint32_t> loop;
  for (;;) {
    auto tok = next();
    if (tok.empty()) throw ParseError("missing 'endsolid'", line, 0);
    if (tok == "endsolid") break;
    if (tok != "facet") throw ParseError("expected 'facet' but found '" + std::string(tok) + "'", line, 0);
    expect("normal");
    number(), number(), number();
    expect("outer");
    expect("loop");
    loop.clear();
    for (tok = next(); tok == "vertex"; tok = next()) {
      double x = number(), y = number(), z = number();
      loop.push_back(welder.add(Vec3(x, y, z)));
    }
    if (tok != "endloop") throw ParseError("expected 'endloop'", line, 0);
    if (loop.size() < 3) throw ParseError("facet with fewer than three vertices", line, 0);
    expect("endfacet");
    for (std::size_t k = 1; k + 1 < loop.size(); ++k) tris.push_back({loop[0], loop[k], loop[k + 1]});
  }
  return finish(name, welder, std::move(tris));
}

}  // namespace

ImportResult import_stl(std::span<const std::byte> bytes, const ImportOptions&) {
  std::string_view text = as_chars(bytes);
  bool binary_consistent = false;
  if (bytes.size() >= 84) {
    std::uint32_t count;
    std::memcpy(&count, bytes.data() + 80, 4);
    binary_consistent = bytes.size() == 84 + 50ull * count;
  }
  if (!binary_consistent && looks_ascii(text)) return import_ascii(text);
  return import_binary(bytes);
}

ExportResult export_stl(const SceneModel& model) {
  ExportResult result;
  ByteWriter w;
  char header[80] = {};
  std::strncpy(header, "orbitcad binary STL", sizeof header);
  for (char c : header) w.put<char>(c);
  std::size_t count_pos = w.size();
  w.put<std::uint32_t>(0);
  std::uint32_t count = 0;
  auto flat = flatten(model);
  for (const FlatEntry& e : flat) {
    BakedMesh baked = bake_node(model, e);
    for (const Triangle& t : baked.triangles) {
      const Vec3& a = baked.positions[t[0]];
      const Vec3& b = baked.positions[t[1]];
      const Vec3& c = baked.positions[t[2]];
      Vec3 n = (b - a).cross(c - a);
      if (n.norm() > 0) n.normalize();
      for (int k = 0; k < 3; ++k) w.put<float>(static_cast<float>(n[k]));
      for (const Vec3* p : {&a, &b, &c}) {
        for (int k = 0; k < 3; ++k) w.put<float>(static_cast<float>((*p)[k]));
      }
      w.put<std::uint16_t>(0);
      ++count;
    }
  }
  std::memcpy(w.buffer().data() + count_pos, &count, 4);
  if (model.nodes().size() > 1) {
    result.warnings.push_back("STL cannot express hierarchy; " + std::to_string(flat.size()) +
                              " mesh nodes were flattened into one solid");
  }
  result.bytes = w.take();
  return result;
}

}  // namespace orbitcad::io::detail
