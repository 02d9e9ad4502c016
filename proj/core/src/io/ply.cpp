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

#include "orbitcad/error.hpp"

#include <cctype>
#include <charconv>
#include <cstring>
#include <sstream>
#include <string>

namespace orbitcad::io::detail {

namespace {

enum class Scalar { kI8, kU8, kI16, kU16, kI32, kU32, kF32, kF64 };

Scalar parse_scalar(const std::string& name, std::size_t line) {
  if (name == "char" || name == "int8") return Scalar::kI8;
  if (name == "uchar" || name == "uint8") return Scalar::kU8;
  if (name == "short" || name == "int16") return Scalar::kI16;
  if (name == "ushort" || name == "uint16") return Scalar::kU16;
  if (name == "int" || name == "int32") return Scalar::kI32;
  if (name == "uint" || name == "uint32") return Scalar::kU32;
  if (name == "float" || name == "float32") return Scalar::kF32;
  if (name == "double" || name == "float64") return Scalar::kF64;
  throw ParseError("unknown PLY scalar type '" + name + "'", line, 0);
}

struct Property {
  std::string name;
  bool is_list = false;
  Scalar count_type = Scalar::kU8;
  Scalar type = Scalar::kF32;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> props;
};

enum class Encoding { kAscii, kBinaryLE, kBinaryBE };

template <typename T>
T load(const std::byte* p, bool swap) {
  T v;
  std::memcpy(&v, p, sizeof v);
  if (swap) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    for (std::size_t i = 0; i < sizeof v / 2; ++i) std::swap(b[i], b[sizeof v - 1 - i]);
  }
  return v;
}

std::size_t scalar_size(Scalar s) {
  switch (s) {
    case Scalar::kI8: case Scalar::kU8: return 1;
    case Scalar::kI16: case Scalar::kU16: return 2;
    case Scalar::kI32: case Scalar::kU32: case Scalar::kF32: return 4;
    case Scalar::kF64: return 8;
  }
  return 0;
}

/// Pulls scalars from either the ASCII token stream or the binary body.
class ValueSource {
 public:
  ValueSource(std::span<const std::byte> body, std::size_t body_offset, std::size_t first_line,
              Encoding enc)
      : body_(body), base_(body_offset), line_(first_line), enc_(enc) {}

  double read(Scalar s) {
    if (enc_ == Encoding::kAscii) return read_ascii();
    std::size_t n = scalar_size(s);
    if (body_.size() - pos_ < n) throw ParseError("PLY body truncated", 0, base_ + pos_);
    const std::byte* p = body_.data() + pos_;
    pos_ += n;
    bool swap = enc_ == Encoding::kBinaryBE;
    switch (s) {
      case Scalar::kI8: return load<std::int8_t>(p, swap);
      case Scalar::kU8: return load<std::uint8_t>(p, swap);
      case Scalar::kI16: return load<std::int16_t>(p, swap);
      case Scalar::kU16: return load<std::uint16_t>(p, swap);
      case Scalar::kI32: return load<std::int32_t>(p, swap);
      case Scalar::kU32: return load<std::uint32_t>(p, swap);
      case Scalar::kF32: return load<float>(p, swap);
      case Scalar::kF64: return load<double>(p, swap);
    }
    return 0;
  }
  std::size_t line() const { return line_; }
  std::size_t offset() const { return base_ + pos_; }

 private:
  double read_ascii() {
    auto text = as_chars(body_);
    while (pos_ < text.size() && std::isspace(static_cast<unsigned char>(text[pos_]))) {
      if (text[pos_] == '\n') ++line_;
      ++pos_;
    }
    std::size_t start = pos_;
    while (pos_ < text.size() && !std::isspace(static_cast<unsigned char>(text[pos_]))) ++pos_;
    auto tok = text.substr(start, pos_ - start);
    if (tok.empty()) throw ParseError("PLY body truncated", line_, 0);
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      throw ParseError("invalid PLY value '" + std::string(tok) + "'", line_, 0);
    }
    return v;
  }

  std::span<const std::byte> body_;
  std::size_t base_;
  std::size_t pos_ = 0;
  std::size_t line_;
  Encoding enc_;
};

}  // namespace

ImportResult import_ply(std::span<const std::byte> bytes, const ImportOptions&) {
  std::string_view text = as_chars(bytes);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= text.size()) throw ParseError("PLY header not terminated", line_no, 0);
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  if (next_line() != "ply") throw ParseError("missing 'ply' magic", 1, 0);
  Encoding enc = Encoding::kAscii;
  std::vector<Element> elements;
  std::string name = "ply";
  for (;;) {
    std::string line = next_line();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "end_header") break;
    if (key.empty() || key == "obj_info") continue;
    if (key == "comment") {
      std::string word;
      ls >> word;
      if (word == "name") {
        std::getline(ls >> std::ws, name);
      }
      continue;
    }
    if (key == "format") {
      std::string f, version;
      ls >> f >> version;
      if (f == "ascii") enc = Encoding::kAscii;
      else if (f == "binary_little_endian") enc = Encoding::kBinaryLE;
      else if (f == "binary_big_endian") enc = Encoding::kBinaryBE;
      else throw ParseError("unknown PLY format '" + f + "'", line_no, 0);
    } else if (key == "element") {
      Element e;
      ls >> e.name >> e.count;
      if (!ls) throw ParseError("malformed element line", line_no, 0);
      elements.push_back(std::move(e));
    } else if (key == "property") {
      if (elements.empty()) throw ParseError("property before any element", line_no, 0);
      Property p;
      std::string t;
      ls >> t;
      if (t == "list") {
        std::string ct, it;
        ls >> ct >> it >> p.name;
        p.is_list = true;
        p.count_type = parse_scalar(ct, line_no);
        p.type = parse_scalar(it, line_no);
      } else {
        p.type = parse_scalar(t, line_no);
        ls >> p.name;
      }
      if (p.name.empty()) throw ParseError("property without a name", line_no, 0);
      elements.back().props.push_back(std::move(p));
    } else {
      throw ParseError("unexpected PLY header keyword '" + key + "'", line_no, 0);
    }
  }

  ValueSource src(bytes.subspan(std::min(pos, bytes.size())), pos, line_no + 1, enc);
  std::vector<Vec3> positions;
  std::vector<Triangle> tris;
  std::vector<std::uint32_t> poly;
  for (const Element& e : elements) {
    int xi = -1, yi = -1, zi = -1, fi = -1;
    for (std::size_t i = 0; i < e.props.size(); ++i) {
      const auto& n = e.props[i].name;
      if (n == "x") xi = static_cast<int>(i);
      if (n == "y") yi = static_cast<int>(i);
      if (n == "z") zi = static_cast<int>(i);
      if ((n == "vertex_indices" || n == "vertex_index") && e.props[i].is_list) fi = static_cast<int>(i);
    }
    bool is_vertex = e.name == "vertex";
    bool is_face = e.name == "face";
    if (is_vertex && (xi < 0 || yi < 0 || zi < 0)) {
      throw ParseError("vertex element lacks x/y/z", line_no, 0);
    }
    for (std::size_t r = 0; r < e.count; ++r) {
      Vec3 p = Vec3::Zero();
      poly.clear();
      for (std::size_t i = 0; i < e.props.size(); ++i) {
        const Property& prop = e.props[i];
        if (prop.is_list) {
          double n = src.read(prop.count_type);
          if (n < 0 || n > 1e6) throw ParseError("bad PLY list length", src.line(), src.offset());
          for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
            double v = src.read(prop.type);
            if (static_cast<int>(i) == fi) {
              if (v < 0) throw ParseError("negative vertex index", src.line(), src.offset());
              poly.push_back(static_cast<std::uint32_t>(v));
            }
          }
        } else {
          double v = src.read(prop.type);
          if (static_cast<int>(i) == xi) p.x() = v;
          if (static_cast<int>(i) == yi) p.y() = v;
          if (static_cast<int>(i) == zi) p.z() = v;
        }
      }
      if (is_vertex) positions.push_back(p);
      if (is_face && fi >= 0) {
        if (poly.size() < 3) throw ParseError("face with fewer than three vertices", src.line(), src.offset());
        for (std::size_t k = 1; k + 1 < poly.size(); ++k) tris.push_back({poly[0], poly[k], poly[k + 1]});
      }
    }
  }
  for (const Triangle& t : tris) {
    for (auto v : t) {
      if (v >= positions.size()) throw ParseError("face index out of range", src.line(), src.offset());
    }
  }

  ImportResult result;
  MeshId mesh = result.model.add_mesh(Mesh(std::move(positions), std::move(tris)));
  result.model.add_node(name, std::nullopt, Transform{}, mesh);
  return result;
}

ExportResult export_ply(const SceneModel& model) {
  ExportResult result;
  std::vector<Vec3> positions;
  std::vector<Triangle> tris;
  auto flat = flatten(model);
  for (const FlatEntry& e : flat) {
    BakedMesh baked = bake_node(model, e);
    auto base = static_cast<std::uint32_t>(positions.size());
    positions.insert(positions.end(), baked.positions.begin(), baked.positions.end());
    for (Triangle t : baked.triangles) {
      for (auto& v : t) v += base;
      tris.push_back(t);
    }
  }
  std::string name = flat.size() == 1 ? model.node(flat.front().node).name : std::string("ply");
  std::string out = "ply\nformat ascii 1.0\ncomment generated by orbitcad\n";
  if (!name.empty() && name.find('\n') == std::string::npos) out += "comment name " + name + "\n";
  out += "element vertex " + std::to_string(positions.size()) +
         "\nproperty double x\nproperty double y\nproperty double z\n";
  out += "element face " + std::to_string(tris.size()) + "\nproperty list uchar uint vertex_indices\nend_header\n";
  for (const Vec3& p : positions) {
    out += format_double(p.x()) + " " + format_double(p.y()) + " " + format_double(p.z()) + "\n";
  }
  for (const Triangle& t : tris) {
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  }
  if (flat.size() > 1 || model.nodes().size() > 1) {
    result.warnings.push_back("PLY cannot express hierarchy; " + std::to_string(flat.size()) +
                              " mesh nodes were flattened into one mesh");
  }
  auto b = as_bytes(out);
  result.bytes.assign(b.begin(), b.end());
  return result;
}

}  // namespace orbitcad::io::detail
