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

#include "orbitcad/align/layout.hpp"

#include "orbitcad/error.hpp"

#include <cstdio>
#include <sstream>

namespace orbitcad::align {

TagLayout build_tag_layout(double tag_size, double spacing, double page_width, double page_height) {
  if (!(tag_size > 0) || !(spacing >= 0) || !(page_width > 0) || !(page_height > 0)) {
    throw InvalidArgument("tag size and page dimensions must be positive, spacing non-negative");
  }
  TagLayout l;
  l.tag_size = tag_size;
  l.spacing = spacing;
  l.page_width = page_width;
  l.page_height = page_height;
  if (l.span() > page_width || l.span() > page_height) {
    throw InvalidArgument("tag grid of " + std::to_string(l.span()) + " m does not fit the page");
  }
  const double offset = 0.5 * (tag_size + spacing);
  const double h = 0.5 * tag_size;
  const Vec3 corner[4] = {{-h, h, 0}, {-h, -h, 0}, {h, -h, 0}, {h, h, 0}};
  for (int tag = 0; tag < 4; ++tag) {
    Vec3 c((tag % 2 == 0 ? -1 : 1) * offset, (tag < 2 ? 1 : -1) * offset, 0);
    for (int k = 0; k < 4; ++k) l.points.push_back({tag, static_cast<PointRole>(k), c + corner[k]});
    l.points.push_back({tag, PointRole::kCenter, c});
  }
  return l;
}

std::string layout_svg(const TagLayout& l) {
  auto mm = [](double m) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", m * 1000.0);
    return std::string(buf);
  };
  const double cx = l.page_width / 2, cy = l.page_height / 2;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << mm(l.page_width) << "mm\" height=\""
    << mm(l.page_height) << "mm\" viewBox=\"0 0 " << mm(l.page_width) << ' ' << mm(l.page_height) << "\">\n";
  s << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int tag = 0; tag < 4; ++tag) {
    Vec3 tl = l.point(tag, PointRole::kTopLeft);
    Vec3 c = l.point(tag, PointRole::kCenter);
    // Page y grows downward.
    s << "  <rect id=\"tag" << tag << "\" x=\"" << mm(cx + tl.x()) << "\" y=\"" << mm(cy - tl.y())
      << "\" width=\"" << mm(l.tag_size) << "\" height=\"" << mm(l.tag_size) << "\" fill=\"black\"/>\n";
    s << "  <circle cx=\"" << mm(cx + c.x()) << "\" cy=\"" << mm(cy - c.y()) << "\" r=\"1\" fill=\"white\"/>\n";
    s << "  <text x=\"" << mm(cx + tl.x()) << "\" y=\"" << mm(cy - tl.y() - 0.003)
      << "\" font-size=\"4\" font-family=\"monospace\">tag " << tag << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace orbitcad::align
