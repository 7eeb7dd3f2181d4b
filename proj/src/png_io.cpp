// shapeprior/png_io.cpp
//
// Copyright 2026 the shapeprior authors
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

#include "shapeprior/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace shapeprior {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

GrayBufferU8 read_gray_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open PNG for reading: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  std::vector<png_bytep> rows;
  GrayBufferU8 out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng error while reading " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  // Normalize anything we might encounter to 8-bit gray.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.pixels.resize(static_cast<size_t>(out.width) * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y)
    rows[y] = out.pixels.data() + static_cast<size_t>(y) * out.width;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void write_gray_png(const std::string& path, const GrayBufferU8& img) {
  if (img.height < 1 || img.width < 1 ||
      img.pixels.size() != static_cast<size_t>(img.height) * img.width)
    throw IoError("write_gray_png: inconsistent buffer dimensions");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open PNG for writing: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng error while writing " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(img.pixels.data() +
                                             static_cast<size_t>(y) * img.width));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

BinaryMask read_mask_png(const std::string& path, float spacing_mm) {
  const GrayBufferU8 raw = read_gray_png(path);
  BinaryMask mask(raw.height, raw.width, spacing_mm);
  for (size_t i = 0; i < raw.pixels.size(); ++i)
    mask.pixels()[i] = raw.pixels[i] >= 128 ? 1 : 0;
  return mask;
}

void write_mask_png(const std::string& path, const BinaryMask& mask) {
  GrayBufferU8 raw;
  raw.height = mask.height();
  raw.width = mask.width();
  raw.pixels.resize(mask.pixels().size());
  for (size_t i = 0; i < raw.pixels.size(); ++i)
    raw.pixels[i] = mask.pixels()[i] ? 255 : 0;
  write_gray_png(path, raw);
}

GrayImage read_image_png(const std::string& path, float spacing_mm) {
  const GrayBufferU8 raw = read_gray_png(path);
  GrayImage img(raw.height, raw.width, spacing_mm);
  for (size_t i = 0; i < raw.pixels.size(); ++i)
    img.pixels[i] = static_cast<float>(raw.pixels[i]) / 255.f;
  return img;
}

void write_image_png(const std::string& path, const GrayImage& image) {
  GrayBufferU8 raw;
  raw.height = image.height;
  raw.width = image.width;
  raw.pixels.resize(image.pixels.size());
  for (size_t i = 0; i < raw.pixels.size(); ++i) {
    const float v = std::clamp(image.pixels[i], 0.f, 1.f);
    raw.pixels[i] = static_cast<std::uint8_t>(std::lround(v * 255.f));
  }
  write_gray_png(path, raw);
}

}  // namespace shapeprior
