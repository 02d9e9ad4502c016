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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace orbitcad::render {

struct Rgba8 {
  std::uint8_t r = 0, g = 0, b = 0, a = 0;
  friend bool operator==(const Rgba8&, const Rgba8&) = default;
};

/// Row-major 8-bit RGBA image, origin top-left.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgba8 fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  Rgba8 at(int x, int y) const;
  void set(int x, int y, Rgba8 c);
  std::span<const std::uint8_t> bytes() const { return data_; }
  /// Copies `src` with its top-left corner at (x, y); clips at the edges.
  void blit(const Image& src, int x, int y);

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Deterministic PNG encoding (fixed zlib level, no timestamps).
std::vector<std::byte> encode_png(const Image& image);
Image decode_png(std::span<const std::byte> png);

/// Raw little-endian float32 depth dump, row-major.
std::vector<std::byte> encode_depth(std::span<const float> depth);

}  // namespace orbitcad::render
