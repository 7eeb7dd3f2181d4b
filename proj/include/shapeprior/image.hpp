// shapeprior/image.hpp
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

#include <vector>

#include "shapeprior/errors.hpp"
#include "shapeprior/mask.hpp"

namespace shapeprior {

/// Single-channel intensity image with values in [0,1].
struct GrayImage {
  int height = 0;
  int width = 0;
  float spacing_mm = kDefaultSpacingMm;
  std::vector<float> pixels;

  GrayImage() = default;
  GrayImage(int h, int w, float spacing = kDefaultSpacingMm)
      : height(h), width(w), spacing_mm(spacing),
        pixels(static_cast<size_t>(h) * w, 0.f) {}

  float at(int row, int col) const {
    return pixels[static_cast<size_t>(row) * width + col];
  }
  float& at(int row, int col) {
    return pixels[static_cast<size_t>(row) * width + col];
  }
};

/// Per-pixel foreground probability in [0,1], produced by models before
/// thresholding.
struct ProbabilityMap {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  ProbabilityMap() = default;
  ProbabilityMap(int h, int w)
      : height(h), width(w), values(static_cast<size_t>(h) * w, 0.f) {}

  float at(int row, int col) const {
    return values[static_cast<size_t>(row) * width + col];
  }
  float& at(int row, int col) {
    return values[static_cast<size_t>(row) * width + col];
  }
};

/// p >= threshold maps to foreground.
BinaryMask threshold_map(const ProbabilityMap& map, double threshold = 0.5,
                         float spacing_mm = kDefaultSpacingMm);

}  // namespace shapeprior
