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

#include "orbitcad/render/image.hpp"

#include "orbitcad/error.hpp"

#include <png.h>

#include <cstring>

namespace orbitcad::render {

Image::Image(int width, int height, Rgba8 fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw InvalidArgument("negative image size");
  data_.resize(static_cast<std::size_t>(width) * height * 4);
  for (std::size_t i = 0; i < data_.size(); i += 4) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
    data_[i + 3] = fill.a;
  }
}

Rgba8 Image::at(int x, int y) const {
  const auto* p = &data_[(static_cast<std::size_t>(y) * width_ + x) * 4];
  return {p[0], p[1], p[2], p[3]};
}

void Image::set(int x, int y, Rgba8 c) {
  auto* p = &data_[(static_cast<std::size_t>(y) * width_ + x) * 4];
  p[0] = c.r;
  p[1] = c.g;
  p[2] = c.b;
  p[3] = c.a;
}

void Image::blit(const Image& src, int x0, int y0) {
  for (int y = 0; y < src.height(); ++y) {
    int ty = y0 + y;
    if (ty < 0 || ty >= height_) continue;
    for (int x = 0; x < src.width(); ++x) {
      int tx = x0 + x;
      if (tx < 0 || tx >= width_) continue;
      set(tx, ty, src.at(x, y));
    }
  }
}

namespace {

void write_cb(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::byte>*>(png_get_io_ptr(png));
  const auto* p = reinterpret_cast<const std::byte*>(data);
  out->insert(out->end(), p, p + len);
}

void flush_cb(png_structp) {}

struct ReadState {
  std::span<const std::byte> data;
  std::size_t pos = 0;
};

void read_cb(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<ReadState*>(png_get_io_ptr(png));
  if (st->data.size() - st->pos < len) png_error(png, "truncated PNG");
  std::memcpy(out, st->data.data() + st->pos, len);
  st->pos += len;
}

}  // namespace

std::vector<std::byte> encode_png(const Image& image) {
  std::vector<std::byte> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("png_error", "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("png_error", "PNG encoding failed");
  }
  png_set_write_fn(png, &out, write_cb, flush_cb);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  auto bytes = image.bytes();
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(y) * image.width() * 4));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image decode_png(std::span<const std::byte> data) {
  ReadState st{data};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("png_error", "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  Image img;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("png_error", "PNG decoding failed");
  }
  png_set_read_fn(png, &st, read_cb);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_gray_to_rgb(png);
  png_set_add_alpha(png, 0xFF, PNG_FILLER_AFTER);
  png_read_update_info(png, info);
  int w = static_cast<int>(png_get_image_width(png, info));
  int h = static_cast<int>(png_get_image_height(png, info));
  img = Image(w, h);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 4);
  for (int y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < w; ++x) {
      img.set(x, y, {row[x * 4], row[x * 4 + 1], row[x * 4 + 2], row[x * 4 + 3]});
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

std::vector<std::byte> encode_depth(std::span<const float> depth) {
  std::vector<std::byte> out(depth.size() * 4);
  std::memcpy(out.data(), depth.data(), out.size());
  return out;
}

}  // namespace orbitcad::render
