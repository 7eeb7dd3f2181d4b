// shapeprior/mask.hpp
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
#include <nlohmann/json_fwd.hpp>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "shapeprior/errors.hpp"

namespace shapeprior {

using Rng = std::mt19937_64;

/// Default isotropic pixel spacing in mm (0.175 mm source rasters downsampled 2x).
inline constexpr float kDefaultSpacingMm = 0.35f;

/// 2-D binary grid with isotropic pixel spacing. Foreground pixels are 1,
/// background 0. The universal currency between segmenters, the shape prior
/// and the evaluation code.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, float spacing_mm = kDefaultSpacingMm)
      : height_(height), width_(width), spacing_mm_(spacing_mm) {
    if (height < 1 || width < 1)
      throw std::invalid_argument("BinaryMask: height and width must be >= 1");
    if (!(spacing_mm > 0.f))
      throw std::invalid_argument("BinaryMask: spacing must be > 0");
    pixels_.assign(static_cast<size_t>(height) * width, 0);
  }

  static BinaryMask filled(int height, int width, bool value,
                           float spacing_mm = kDefaultSpacingMm) {
    BinaryMask m(height, width, spacing_mm);
    if (value) m.pixels_.assign(m.pixels_.size(), 1);
    return m;
  }

  int height() const { return height_; }
  int width() const { return width_; }
  float spacing_mm() const { return spacing_mm_; }
  void set_spacing_mm(float s) {
    if (!(s > 0.f)) throw std::invalid_argument("BinaryMask: spacing must be > 0");
    spacing_mm_ = s;
  }

  bool contains(int row, int col) const {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }
  bool get(int row, int col) const {
    return pixels_[static_cast<size_t>(row) * width_ + col] != 0;
  }
  void set(int row, int col, bool v) {
    pixels_[static_cast<size_t>(row) * width_ + col] = v ? 1 : 0;
  }

  int foreground_count() const;
  bool foreground_empty() const { return foreground_count() == 0; }
  double foreground_fraction() const {
    return static_cast<double>(foreground_count()) / (static_cast<double>(height_) * width_);
  }

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  std::vector<std::uint8_t>& pixels() { return pixels_; }

  bool operator==(const BinaryMask& o) const {
    return height_ == o.height_ && width_ == o.width_ && pixels_ == o.pixels_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  float spacing_mm_ = kDefaultSpacingMm;
  std::vector<std::uint8_t> pixels_;
};

struct PixelCoord {
  int row = 0;
  int col = 0;
  bool operator==(const PixelCoord&) const = default;
};

enum class SeShape { kDisk, kSquare };

/// Symmetric structuring element for binary morphology.
struct StructuringElement {
  SeShape shape = SeShape::kSquare;
  int radius = 1;

  static StructuringElement disk(int radius) { return {SeShape::kDisk, radius}; }
  static StructuringElement square(int radius) { return {SeShape::kSquare, radius}; }

  /// All (drow, dcol) offsets covered by the element, center included.
  std::vector<std::pair<int, int>> offsets() const;
};

enum class ShapeKind { kCircle, kEllipse, kLine, kRectangle };
enum class PaintMode { kAdd, kRemove };

/// Analytic shape to be painted onto (or erased from) a mask. Coordinates are
/// continuous pixel coordinates; a pixel belongs to the shape iff its center
/// (row + 0.5 handled as integer coordinates: center of pixel (r,c) is (r,c))
/// satisfies the shape inequality.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::kCircle;
  PaintMode mode = PaintMode::kAdd;
  double cx = 0, cy = 0;      // circle/ellipse center (col, row)
  double a = 0, b = 0;        // circle radius (a) / ellipse semi-axes
  double x0 = 0, y0 = 0;      // line endpoint / rectangle corner
  double x1 = 0, y1 = 0;      // line endpoint / rectangle opposite corner
  double thickness = 3.0;     // line stroke width in pixels

  static ShapeSpec circle(double cy, double cx, double radius, PaintMode mode);
  static ShapeSpec ellipse(double cy, double cx, double semi_a, double semi_b,
                           PaintMode mode);
  static ShapeSpec line(double y0, double x0, double y1, double x1,
                        double thickness, PaintMode mode);
  static ShapeSpec rectangle(double y0, double x0, double y1, double x1,
                             PaintMode mode);
};

/// Parameters of the stochastic mask corruption applied during shape-prior
/// training: random geometric shapes, morphology with variable kernels and
/// border label swaps.
struct DegradationConfig {
  int shape_count_min = 1;
  int shape_count_max = 3;
  double shape_size_min = 0.05;  // fraction of min(height, width)
  double shape_size_max = 0.30;
  int morph_kernel_min = 3;  // odd kernel sizes, pixels
  int morph_kernel_max = 15;
  double border_swap_probability = 0.3;
  int border_band = 3;
  double weight_shapes = 1.0 / 3.0;
  double weight_morphology = 1.0 / 3.0;
  double weight_border_swap = 1.0 / 3.0;
  int ops_per_call = 1;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  /// Parses a flat key-value document. Unknown keys are an error.
  static DegradationConfig from_json(const nlohmann::json& j);
};

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);
BinaryMask morphological_open(const BinaryMask& mask, const StructuringElement& se);
BinaryMask morphological_close(const BinaryMask& mask, const StructuringElement& se);
BinaryMask complement(const BinaryMask& mask);

/// Paints spec onto canvas (mode add: OR, mode remove: AND NOT). Pixels are
/// included by a center-of-pixel test. Throws InvalidShape for degenerate
/// parameters (zero axis, identical endpoints, thickness < 1).
BinaryMask rasterize_shape(const ShapeSpec& spec, const BinaryMask& canvas);

/// Flips each pixel within Chebyshev distance `band` of the foreground
/// boundary independently with probability p. Deterministic for a fixed rng
/// state: pixels are visited in row-major order and one variate is drawn per
/// band pixel.
BinaryMask border_label_swap(const BinaryMask& mask, int band, double p, Rng& rng);

/// The composite corruption: samples cfg.ops_per_call degradation families by
/// weight and applies them in sequence. Output dimensions equal input.
BinaryMask degrade(const BinaryMask& mask, const DegradationConfig& cfg, Rng& rng);

/// Foreground pixels with at least one 4-neighbor that is background or out
/// of bounds, in row-major order. Empty iff the mask has no foreground.
std::vector<PixelCoord> boundary(const BinaryMask& mask);

struct ComponentLabeling {
  int height = 0;
  int width = 0;
  int count = 0;
  std::vector<int> labels;  // 0 = background, components labeled 1..count

  int label(int row, int col) const {
    return labels[static_cast<size_t>(row) * width + col];
  }
};

/// 8-connectivity component labeling; labels assigned in row-major discovery
/// order.
ComponentLabeling connected_components(const BinaryMask& mask);

}  // namespace shapeprior
