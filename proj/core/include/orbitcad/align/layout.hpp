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

#include "orbitcad/scene/geometry.hpp"

#include <string>
#include <vector>

namespace orbitcad::align {

/// Corner order is counter-clockwise starting at the top-left corner.
enum class PointRole { kTopLeft = 0, kBottomLeft = 1, kBottomRight = 2, kTopRight = 3, kCenter = 4 };

struct LayoutPoint {
  int tag = 0;
  PointRole role = PointRole::kCenter;
  Vec3 position = Vec3::Zero();  // marker frame, meters, z = 0
};

inline constexpr double kLetterWidth = 0.2159;
inline constexpr double kLetterHeight = 0.2794;

/// Four square tags in a 2x2 grid centered on the marker origin (x right,
/// y up). Tags are numbered row-major from the top-left.
struct TagLayout {
  double tag_size = 0.0;
  double spacing = 0.0;
  double page_width = kLetterWidth;
  double page_height = kLetterHeight;
  std::vector<LayoutPoint> points;  // tag-major, 5 per tag, center last

  Vec3 point(int tag, PointRole role) const { return points.at(tag * 5 + static_cast<int>(role)).position; }
  double span() const { return 2 * tag_size + spacing; }
};

/// Throws InvalidArgument unless sizes are positive and the grid fits the page.
TagLayout build_tag_layout(double tag_size = 0.07, double spacing = 0.02,
                           double page_width = kLetterWidth, double page_height = kLetterHeight);

/// Printable page (millimeter units) with tag outlines, ids and center marks.
std::string layout_svg(const TagLayout& layout);

}  // namespace orbitcad::align
