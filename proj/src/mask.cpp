// shapeprior/mask.cpp
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

#include "shapeprior/mask.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

namespace shapeprior {

int BinaryMask::foreground_count() const {
  int n = 0;
  for (std::uint8_t p : pixels_) n += p;
  return n;
}

std::vector<std::pair<int, int>> StructuringElement::offsets() const {
  if (radius < 1)
    throw std::invalid_argument("StructuringElement: radius must be >= 1");
  std::vector<std::pair<int, int>> offs;
  const long r2 = static_cast<long>(radius) * radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (shape == SeShape::kDisk && static_cast<long>(dy) * dy + static_cast<long>(dx) * dx > r2)
        continue;
      offs.emplace_back(dy, dx);
    }
  }
  return offs;
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
  const auto offs = se.offsets();
  BinaryMask out(mask.height(), mask.width(), mask.spacing_mm());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      bool keep = true;
      for (const auto& [dy, dx] : offs) {
        const int yy = y + dy, xx = x + dx;
        // Out of bounds counts as background.
        if (!mask.contains(yy, xx) || !mask.get(yy, xx)) {
          keep = false;
          break;
        }
      }
      out.set(y, x, keep);
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
  const auto offs = se.offsets();
  BinaryMask out(mask.height(), mask.width(), mask.spacing_mm());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      bool hit = false;
      for (const auto& [dy, dx] : offs) {
        const int yy = y + dy, xx = x + dx;
        if (mask.contains(yy, xx) && mask.get(yy, xx)) {
          hit = true;
          break;
        }
      }
      out.set(y, x, hit);
    }
  }
  return out;
}

BinaryMask morphological_open(const BinaryMask& mask, const StructuringElement& se) {
  return dilate(erode(mask, se), se);
}

BinaryMask morphological_close(const BinaryMask& mask, const StructuringElement& se) {
  return erode(dilate(mask, se), se);
}

BinaryMask complement(const BinaryMask& mask) {
  BinaryMask out(mask.height(), mask.width(), mask.spacing_mm());
  for (size_t i = 0; i < mask.pixels().size(); ++i)
    out.pixels()[i] = mask.pixels()[i] ? 0 : 1;
  return out;
}

ShapeSpec ShapeSpec::circle(double cy, double cx, double radius, PaintMode mode) {
  ShapeSpec s;
  s.kind = ShapeKind::kCircle;
  s.mode = mode;
  s.cy = cy;
  s.cx = cx;
  s.a = radius;
  return s;
}

ShapeSpec ShapeSpec::ellipse(double cy, double cx, double semi_a, double semi_b,
                             PaintMode mode) {
  ShapeSpec s;
  s.kind = ShapeKind::kEllipse;
  s.mode = mode;
  s.cy = cy;
  s.cx = cx;
  s.a = semi_a;
  s.b = semi_b;
  return s;
}

ShapeSpec ShapeSpec::line(double y0, double x0, double y1, double x1,
                          double thickness, PaintMode mode) {
  ShapeSpec s;
  s.kind = ShapeKind::kLine;
  s.mode = mode;
  s.y0 = y0;
  s.x0 = x0;
  s.y1 = y1;
  s.x1 = x1;
  s.thickness = thickness;
  return s;
}

ShapeSpec ShapeSpec::rectangle(double y0, double x0, double y1, double x1,
                               PaintMode mode) {
  ShapeSpec s;
  s.kind = ShapeKind::kRectangle;
  s.mode = mode;
  s.y0 = y0;
  s.x0 = x0;
  s.y1 = y1;
  s.x1 = x1;
  return s;
}

namespace {

double point_segment_distance(double py, double px, double y0, double x0,
                              double y1, double x1) {
  const double vy = y1 - y0, vx = x1 - x0;
  const double len2 = vy * vy + vx * vx;
  double t = ((py - y0) * vy + (px - x0) * vx) / len2;
  t = std::clamp(t, 0.0, 1.0);
  const double dy = py - (y0 + t * vy), dx = px - (x0 + t * vx);
  return std::sqrt(dy * dy + dx * dx);
}

bool shape_contains(const ShapeSpec& s, int row, int col) {
  const double y = row, x = col;
  switch (s.kind) {
    case ShapeKind::kCircle: {
      const double dy = y - s.cy, dx = x - s.cx;
      return dy * dy + dx * dx <= s.a * s.a;
    }
    case ShapeKind::kEllipse: {
      const double dy = (y - s.cy) / s.b, dx = (x - s.cx) / s.a;
      return dx * dx + dy * dy <= 1.0;
    }
    case ShapeKind::kLine:
      return point_segment_distance(y, x, s.y0, s.x0, s.y1, s.x1) <= s.thickness / 2.0;
    case ShapeKind::kRectangle: {
      const double ylo = std::min(s.y0, s.y1), yhi = std::max(s.y0, s.y1);
      const double xlo = std::min(s.x0, s.x1), xhi = std::max(s.x0, s.x1);
      return y >= ylo && y <= yhi && x >= xlo && x <= xhi;
    }
  }
  return false;
}

void validate_shape(const ShapeSpec& s) {
  switch (s.kind) {
    case ShapeKind::kCircle:
      if (!(s.a > 0)) throw InvalidShape("circle radius must be > 0");
      break;
    case ShapeKind::kEllipse:
      if (!(s.a > 0) || !(s.b > 0)) throw InvalidShape("ellipse axes must be > 0");
      break;
    case ShapeKind::kLine:
      if (s.y0 == s.y1 && s.x0 == s.x1)
        throw InvalidShape("line endpoints must differ");
      if (!(s.thickness >= 1.0)) throw InvalidShape("line thickness must be >= 1");
      break;
    case ShapeKind::kRectangle:
      if (s.y0 == s.y1 || s.x0 == s.x1)
        throw InvalidShape("rectangle extent must be > 0");
      break;
  }
}

}  // namespace

BinaryMask rasterize_shape(const ShapeSpec& spec, const BinaryMask& canvas) {
  validate_shape(spec);
  BinaryMask out = canvas;
  const bool add = spec.mode == PaintMode::kAdd;
  for (int y = 0; y < canvas.height(); ++y) {
    for (int x = 0; x < canvas.width(); ++x) {
      if (!shape_contains(spec, y, x)) continue;
      out.set(y, x, add);
    }
  }
  return out;
}

BinaryMask border_label_swap(const BinaryMask& mask, int band, double p, Rng& rng) {
  if (band < 1) throw std::invalid_argument("border_label_swap: band must be >= 1");
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("border_label_swap: p must be in [0,1]");

  const int h = mask.height(), w = mask.width();
  // Chebyshev distance to the boundary set, grown one ring per pass.
  std::vector<int> dist(static_cast<size_t>(h) * w, band + 1);
  std::vector<PixelCoord> frontier = boundary(mask);
  for (const auto& pc : frontier) dist[static_cast<size_t>(pc.row) * w + pc.col] = 0;
  for (int d = 1; d <= band && !frontier.empty(); ++d) {
    std::vector<PixelCoord> next;
    for (const auto& pc : frontier) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int yy = pc.row + dy, xx = pc.col + dx;
          if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
          auto& cell = dist[static_cast<size_t>(yy) * w + xx];
          if (cell > d) {
            cell = d;
            next.push_back({yy, xx});
          }
        }
      }
    }
    frontier = std::move(next);
  }

  BinaryMask out = mask;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (dist[static_cast<size_t>(y) * w + x] > band) continue;
      if (uni(rng) < p) out.set(y, x, !mask.get(y, x));
    }
  }
  return out;
}

void DegradationConfig::validate() const {
  if (shape_count_min < 0 || shape_count_min > shape_count_max)
    throw std::invalid_argument("DegradationConfig: bad shape_count_range");
  if (!(shape_size_min > 0) || shape_size_min > shape_size_max)
    throw std::invalid_argument("DegradationConfig: bad shape_size_range");
  if (morph_kernel_min < 3 || morph_kernel_min > morph_kernel_max)
    throw std::invalid_argument("DegradationConfig: bad morph_kernel_range");
  if (border_swap_probability < 0 || border_swap_probability > 1)
    throw std::invalid_argument("DegradationConfig: border_swap_probability not in [0,1]");
  if (border_band < 1) throw std::invalid_argument("DegradationConfig: border_band < 1");
  if (weight_shapes < 0 || weight_morphology < 0 || weight_border_swap < 0)
    throw std::invalid_argument("DegradationConfig: negative op weight");
  const double sum = weight_shapes + weight_morphology + weight_border_swap;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("DegradationConfig: op weights must sum to 1");
  if (ops_per_call < 1)
    throw std::invalid_argument("DegradationConfig: ops_per_call must be >= 1");
}

nlohmann::json DegradationConfig::to_json() const {
  return nlohmann::json{
      {"shape_count_range", {shape_count_min, shape_count_max}},
      {"shape_size_range", {shape_size_min, shape_size_max}},
      {"morph_kernel_range", {morph_kernel_min, morph_kernel_max}},
      {"border_swap_probability", border_swap_probability},
      {"border_band", border_band},
      {"op_probabilities",
       {{"shapes", weight_shapes},
        {"morphology", weight_morphology},
        {"border_swap", weight_border_swap}}},
      {"ops_per_call", ops_per_call},
      {"seed", seed}};
}

DegradationConfig DegradationConfig::from_json(const nlohmann::json& j) {
  DegradationConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "shape_count_range") {
      cfg.shape_count_min = value.at(0).get<int>();
      cfg.shape_count_max = value.at(1).get<int>();
    } else if (key == "shape_size_range") {
      cfg.shape_size_min = value.at(0).get<double>();
      cfg.shape_size_max = value.at(1).get<double>();
    } else if (key == "morph_kernel_range") {
      cfg.morph_kernel_min = value.at(0).get<int>();
      cfg.morph_kernel_max = value.at(1).get<int>();
    } else if (key == "border_swap_probability") {
      cfg.border_swap_probability = value.get<double>();
    } else if (key == "border_band") {
      cfg.border_band = value.get<int>();
    } else if (key == "op_probabilities") {
      for (const auto& [op, wgt] : value.items()) {
        if (op == "shapes")
          cfg.weight_shapes = wgt.get<double>();
        else if (op == "morphology")
          cfg.weight_morphology = wgt.get<double>();
        else if (op == "border_swap")
          cfg.weight_border_swap = wgt.get<double>();
        else
          throw SchemaError("DegradationConfig: unknown op weight '" + op + "'");
      }
    } else if (key == "ops_per_call") {
      cfg.ops_per_call = value.get<int>();
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else {
      throw SchemaError("DegradationConfig: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

namespace {

enum class DegradeFamily { kShapes, kMorphology, kBorderSwap };

DegradeFamily sample_family(const DegradationConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double u = uni(rng);
  if (u < cfg.weight_shapes) return DegradeFamily::kShapes;
  if (u < cfg.weight_shapes + cfg.weight_morphology) return DegradeFamily::kMorphology;
  return DegradeFamily::kBorderSwap;
}

BinaryMask apply_random_shapes(const BinaryMask& mask, const DegradationConfig& cfg,
                               Rng& rng) {
  const int h = mask.height(), w = mask.width();
  const double base = std::min(h, w);
  std::uniform_int_distribution<int> count_dist(cfg.shape_count_min, cfg.shape_count_max);
  std::uniform_int_distribution<int> kind_dist(0, 3);
  std::uniform_int_distribution<int> mode_dist(0, 1);
  std::uniform_real_distribution<double> size_dist(cfg.shape_size_min, cfg.shape_size_max);
  std::uniform_real_distribution<double> ypos(0.0, h - 1.0);
  std::uniform_real_distribution<double> xpos(0.0, w - 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);

  BinaryMask out = mask;
  const int n = count_dist(rng);
  for (int i = 0; i < n; ++i) {
    const auto kind = static_cast<ShapeKind>(kind_dist(rng));
    const auto mode = mode_dist(rng) == 0 ? PaintMode::kAdd : PaintMode::kRemove;
    const double cy = ypos(rng), cx = xpos(rng);
    ShapeSpec spec;
    switch (kind) {
      case ShapeKind::kCircle:
        spec = ShapeSpec::circle(cy, cx, std::max(0.5, size_dist(rng) * base / 2.0), mode);
        break;
      case ShapeKind::kEllipse: {
        const double sa = std::max(0.5, size_dist(rng) * base / 2.0);
        const double sb = std::max(0.5, size_dist(rng) * base / 2.0);
        spec = ShapeSpec::ellipse(cy, cx, sa, sb, mode);
        break;
      }
      case ShapeKind::kLine: {
        const double len = std::max(2.0, size_dist(rng) * base);
        const double th = angle(rng);
        spec = ShapeSpec::line(cy - std::sin(th) * len / 2.0, cx - std::cos(th) * len / 2.0,
                               cy + std::sin(th) * len / 2.0, cx + std::cos(th) * len / 2.0,
                               3.0, mode);
        break;
      }
      case ShapeKind::kRectangle: {
        const double eh = std::max(1.0, size_dist(rng) * base);
        const double ew = std::max(1.0, size_dist(rng) * base);
        spec = ShapeSpec::rectangle(cy - eh / 2.0, cx - ew / 2.0, cy + eh / 2.0,
                                    cx + ew / 2.0, mode);
        break;
      }
    }
    out = rasterize_shape(spec, out);
  }
  return out;
}

BinaryMask apply_random_morphology(const BinaryMask& mask, const DegradationConfig& cfg,
                                   Rng& rng) {
  // Odd kernel sizes only; kernel size k maps to radius (k-1)/2.
  const int lo = (cfg.morph_kernel_min + 1) / 2;
  const int hi = cfg.morph_kernel_max / 2;
  std::uniform_int_distribution<int> radius_dist(lo, std::max(lo, hi));
  std::uniform_int_distribution<int> shape_dist(0, 1);
  std::uniform_int_distribution<int> op_dist(0, 3);

  StructuringElement se;
  se.radius = radius_dist(rng);
  se.shape = shape_dist(rng) == 0 ? SeShape::kDisk : SeShape::kSquare;
  switch (op_dist(rng)) {
    case 0: return erode(mask, se);
    case 1: return dilate(mask, se);
    case 2: return morphological_open(mask, se);
    default: return morphological_close(mask, se);
  }
}

}  // namespace

BinaryMask degrade(const BinaryMask& mask, const DegradationConfig& cfg, Rng& rng) {
  cfg.validate();
  BinaryMask out = mask;
  for (int op = 0; op < cfg.ops_per_call; ++op) {
    switch (sample_family(cfg, rng)) {
      case DegradeFamily::kShapes:
        out = apply_random_shapes(out, cfg, rng);
        break;
      case DegradeFamily::kMorphology:
        out = apply_random_morphology(out, cfg, rng);
        break;
      case DegradeFamily::kBorderSwap:
        out = border_label_swap(out, cfg.border_band, cfg.border_swap_probability, rng);
        break;
    }
  }
  return out;
}

std::vector<PixelCoord> boundary(const BinaryMask& mask) {
  std::vector<PixelCoord> result;
  const int h = mask.height(), w = mask.width();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.get(y, x)) continue;
      const bool edge = y == 0 || !mask.get(y - 1, x) || y == h - 1 ||
                        !mask.get(y + 1, x) || x == 0 || !mask.get(y, x - 1) ||
                        x == w - 1 || !mask.get(y, x + 1);
      if (edge) result.push_back({y, x});
    }
  }
  return result;
}

ComponentLabeling connected_components(const BinaryMask& mask) {
  const int h = mask.height(), w = mask.width();
  ComponentLabeling out;
  out.height = h;
  out.width = w;
  out.labels.assign(static_cast<size_t>(h) * w, 0);

  std::vector<PixelCoord> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.get(y, x) || out.labels[static_cast<size_t>(y) * w + x] != 0) continue;
      const int label = ++out.count;
      stack.push_back({y, x});
      out.labels[static_cast<size_t>(y) * w + x] = label;
      while (!stack.empty()) {
        const PixelCoord pc = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int yy = pc.row + dy, xx = pc.col + dx;
            if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
            auto& cell = out.labels[static_cast<size_t>(yy) * w + xx];
            if (mask.get(yy, xx) && cell == 0) {
              cell = label;
              stack.push_back({yy, xx});
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace shapeprior
