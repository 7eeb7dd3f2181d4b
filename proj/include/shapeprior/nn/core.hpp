// shapeprior/nn/core.hpp
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

#include <Eigen/Core>
#include <random>
#include <string>
#include <vector>

namespace shapeprior::nn {

using Rng = std::mt19937_64;

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

/// Batched feature maps stored channel-by-row: m(c, n*h*w + y*w + x).
template <typename T>
struct FeatureMap {
  Mat<T> m;
  int n = 0, c = 0, h = 0, w = 0;

  FeatureMap() = default;
  FeatureMap(int n_, int c_, int h_, int w_) : n(n_), c(c_), h(h_), w(w_) {
    m.setZero(c_, static_cast<Eigen::Index>(n_) * h_ * w_);
  }
};

/// Named parameter tensor with its gradient accumulator. `shape` is the
/// logical tensor shape used by checkpoints; `value` is its 2-D compute
/// layout.
template <typename T>
struct Param {
  std::string name;
  std::vector<int> shape;
  Mat<T> value;
  Mat<T> grad;

  void init_zero(int rows, int cols, std::vector<int> logical) {
    shape = std::move(logical);
    value.setZero(rows, cols);
    grad.setZero(rows, cols);
  }
};

inline int conv_out_extent(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

/// Unrolls 3x3/1x1 neighborhoods into columns:
/// col((c*k + di)*k + dj, n*oh*ow + oy*ow + ox) = x(c, n*h*w + iy*w + ix)
/// with iy = oy*stride + di - pad (zero outside the image).
template <typename T>
void im2col(const FeatureMap<T>& x, int k, int stride, int pad, Mat<T>& col,
            int& oh, int& ow) {
  oh = conv_out_extent(x.h, k, stride, pad);
  ow = conv_out_extent(x.w, k, stride, pad);
  col.resize(static_cast<Eigen::Index>(x.c) * k * k,
             static_cast<Eigen::Index>(x.n) * oh * ow);
  const int hw = x.h * x.w;
  for (int n = 0; n < x.n; ++n) {
    const Eigen::Index in_base = static_cast<Eigen::Index>(n) * hw;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const Eigen::Index ocol =
            (static_cast<Eigen::Index>(n) * oh + oy) * ow + ox;
        T* dst = col.data() + ocol * col.rows();
        for (int c = 0; c < x.c; ++c) {
          const T* src = x.m.data() + (in_base)*x.c + c;  // x(c, in_base + idx)
          for (int di = 0; di < k; ++di) {
            const int iy = oy * stride + di - pad;
            for (int dj = 0; dj < k; ++dj) {
              const int ix = ox * stride + dj - pad;
              T v = T(0);
              if (iy >= 0 && iy < x.h && ix >= 0 && ix < x.w)
                v = src[static_cast<Eigen::Index>(iy * x.w + ix) * x.c];
              *dst++ = v;
            }
          }
        }
      }
    }
  }
}

/// Scatter-add inverse of im2col; accumulates into x (which must be
/// pre-sized and zeroed by the caller when used as a gradient buffer).
template <typename T>
void col2im(const Mat<T>& col, int k, int stride, int pad, FeatureMap<T>& x) {
  const int oh = conv_out_extent(x.h, k, stride, pad);
  const int ow = conv_out_extent(x.w, k, stride, pad);
  const int hw = x.h * x.w;
  for (int n = 0; n < x.n; ++n) {
    const Eigen::Index in_base = static_cast<Eigen::Index>(n) * hw;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const Eigen::Index ocol =
            (static_cast<Eigen::Index>(n) * oh + oy) * ow + ox;
        const T* src = col.data() + ocol * col.rows();
        for (int c = 0; c < x.c; ++c) {
          T* dst = x.m.data() + (in_base)*x.c + c;
          for (int di = 0; di < k; ++di) {
            const int iy = oy * stride + di - pad;
            for (int dj = 0; dj < k; ++dj) {
              const int ix = ox * stride + dj - pad;
              const T v = *src++;
              if (iy >= 0 && iy < x.h && ix >= 0 && ix < x.w)
                dst[static_cast<Eigen::Index>(iy * x.w + ix) * x.c] += v;
            }
          }
        }
      }
    }
  }
}

/// Fan-in scaled truncated-normal init (resampled beyond two sigma).
template <typename T>
void truncated_normal_init(Mat<T>& w, int fan_in, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    double z = normal(rng);
    while (std::abs(z) > 2.0) z = normal(rng);
    w.data()[i] = static_cast<T>(z * stddev);
  }
}

}  // namespace shapeprior::nn
