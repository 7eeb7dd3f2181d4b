// shapeprior/png_io.hpp
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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapeprior/image.hpp"
#include "shapeprior/mask.hpp"

namespace shapeprior {

/// Raw 8-bit grayscale buffer as stored on disk.
struct GrayBufferU8 {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;
};

GrayBufferU8 read_gray_png(const std::string& path);
void write_gray_png(const std::string& path, const GrayBufferU8& img);

/// Mask files are 8-bit single-channel PNG, 0 = background, 255 = foreground.
/// Any stored value >= 128 decodes to foreground.
BinaryMask read_mask_png(const std::string& path, float spacing_mm = kDefaultSpacingMm);
void write_mask_png(const std::string& path, const BinaryMask& mask);

/// Intensity images round-trip through 8-bit gray PNG: v -> round(255 v).
GrayImage read_image_png(const std::string& path, float spacing_mm = kDefaultSpacingMm);
void write_image_png(const std::string& path, const GrayImage& image);

}  // namespace shapeprior
