// shapeprior/nn/layers.hpp
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

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapeprior/nn/core.hpp"

namespace shapeprior::nn {

// Layers keep parameters and accumulated gradients as members but stash all
// per-pass activations in caller-owned Ctx structs, so the forward path is
// const and safe for concurrent inference.

template <typename T>
class Conv2d {
 public:
  Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride)
      : name_(std::move(name)), in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel),
        stride_(stride), pad_(kernel / 2) {
    w_.name = name_ + ".w";
    w_.init_zero(out_ch, in_ch * kernel * kernel, {out_ch, in_ch, kernel, kernel});
    b_.name = name_ + ".b";
    b_.init_zero(out_ch, 1, {out_ch});
  }

  void init(Rng& rng) { truncated_normal_init(w_.value, in_ch_ * kernel_ * kernel_, rng); }

  struct Ctx {
    Mat<T> col;
    int n = 0, h = 0, w = 0;
  };

  FeatureMap<T> forward(const FeatureMap<T>& x, Ctx* ctx) const {
    Mat<T> col;
    int oh = 0, ow = 0;
    im2col(x, kernel_, stride_, pad_, col, oh, ow);
    FeatureMap<T> y(x.n, out_ch_, oh, ow);
    y.m.noalias() = w_.value * col;
    y.m.colwise() += b_.value.col(0);
    if (ctx) {
      ctx->col = std::move(col);
      ctx->n = x.n;
      ctx->h = x.h;
      ctx->w = x.w;
    }
    return y;
  }

  FeatureMap<T> backward(const FeatureMap<T>& gy, const Ctx& ctx) {
    w_.grad.noalias() += gy.m * ctx.col.transpose();
    b_.grad.col(0).noalias() += gy.m.rowwise().sum();
    Mat<T> dcol;
    dcol.noalias() = w_.value.transpose() * gy.m;
    FeatureMap<T> gx(ctx.n, in_ch_, ctx.h, ctx.w);
    col2im(dcol, kernel_, stride_, pad_, gx);
    return gx;
  }

  std::vector<Param<T>*> params() { return {&w_, &b_}; }
  int out_channels() const { return out_ch_; }

 private:
  std::string name_;
  int in_ch_, out_ch_, kernel_, stride_, pad_;
  Param<T> w_, b_;
};

/// Resolution-doubling transposed convolution (kernel 3, stride 2, pad 1,
/// output padding 1). Forward is the data-gradient of a stride-2 Conv2d, so
/// im2col/col2im are shared with the forward convolution.
template <typename T>
class ConvTranspose2d {
 public:
  ConvTranspose2d(std::string name, int in_ch, int out_ch)
      : name_(std::move(name)), in_ch_(in_ch), out_ch_(out_ch) {
    w_.name = name_ + ".w";
    w_.init_zero(in_ch, out_ch * 9, {in_ch, out_ch, 3, 3});
    b_.name = name_ + ".b";
    b_.init_zero(out_ch, 1, {out_ch});
  }

  void init(Rng& rng) { truncated_normal_init(w_.value, in_ch_ * 9, rng); }

  struct Ctx {
    Mat<T> x;  // input activations (in_ch x n*h*w)
    int n = 0, h = 0, w = 0;
  };

  FeatureMap<T> forward(const FeatureMap<T>& x, Ctx* ctx) const {
    Mat<T> dcol;
    dcol.noalias() = w_.value.transpose() * x.m;  // (out_ch*9, n*h*w)
    FeatureMap<T> y(x.n, out_ch_, 2 * x.h, 2 * x.w);
    col2im(dcol, 3, 2, 1, y);
    y.m.colwise() += b_.value.col(0);
    if (ctx) {
      ctx->x = x.m;
      ctx->n = x.n;
      ctx->h = x.h;
      ctx->w = x.w;
    }
    return y;
  }

  FeatureMap<T> backward(const FeatureMap<T>& gy, const Ctx& ctx) {
    Mat<T> col;
    int oh = 0, ow = 0;
    im2col(gy, 3, 2, 1, col, oh, ow);  // back to (out_ch*9, n*h*w)
    w_.grad.noalias() += ctx.x * col.transpose();
    b_.grad.col(0).noalias() += gy.m.rowwise().sum();
    FeatureMap<T> gx(ctx.n, in_ch_, ctx.h, ctx.w);
    gx.m.noalias() = w_.value * col;
    return gx;
  }

  std::vector<Param<T>*> params() { return {&w_, &b_}; }

 private:
  std::string name_;
  int in_ch_, out_ch_;
  Param<T> w_, b_;
};

template <typename T>
class Dense {
 public:
  Dense(std::string name, int in, int out) : name_(std::move(name)), in_(in), out_(out) {
    w_.name = name_ + ".w";
    w_.init_zero(out, in, {out, in});
    b_.name = name_ + ".b";
    b_.init_zero(out, 1, {out});
  }

  void init(Rng& rng) { truncated_normal_init(w_.value, in_, rng); }

  struct Ctx {
    Mat<T> x;
  };

  Mat<T> forward(const Mat<T>& x, Ctx* ctx) const {
    Mat<T> y = w_.value * x;
    y.colwise() += b_.value.col(0);
    if (ctx) ctx->x = x;
    return y;
  }

  Mat<T> backward(const Mat<T>& gy, const Ctx& ctx) {
    w_.grad.noalias() += gy * ctx.x.transpose();
    b_.grad.col(0).noalias() += gy.rowwise().sum();
    return w_.value.transpose() * gy;
  }

  std::vector<Param<T>*> params() { return {&w_, &b_}; }

 private:
  std::string name_;
  int in_, out_;
  Param<T> w_, b_;
};

template <typename T>
class MaxPool2d {
 public:
  struct Ctx {
    std::vector<Eigen::Index> argmax;  // flat source index per output element
    int n = 0, c = 0, h = 0, w = 0;
  };

  FeatureMap<T> forward(const FeatureMap<T>& x, Ctx* ctx) const {
    if (x.h % 2 != 0 || x.w % 2 != 0)
      throw std::invalid_argument("MaxPool2d: extent must be even");
    const int oh = x.h / 2, ow = x.w / 2;
    FeatureMap<T> y(x.n, x.c, oh, ow);
    if (ctx) {
      ctx->argmax.assign(static_cast<size_t>(x.n) * x.c * oh * ow, 0);
      ctx->n = x.n;
      ctx->c = x.c;
      ctx->h = x.h;
      ctx->w = x.w;
    }
    for (int n = 0; n < x.n; ++n) {
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          const Eigen::Index ocol = (static_cast<Eigen::Index>(n) * oh + oy) * ow + ox;
          for (int c = 0; c < x.c; ++c) {
            T best = -std::numeric_limits<T>::infinity();
            Eigen::Index best_idx = 0;
            for (int dy = 0; dy < 2; ++dy) {
              for (int dx = 0; dx < 2; ++dx) {
                const Eigen::Index icol =
                    (static_cast<Eigen::Index>(n) * x.h + 2 * oy + dy) * x.w + 2 * ox + dx;
                const T v = x.m(c, icol);
                if (v > best) {
                  best = v;
                  best_idx = icol;
                }
              }
            }
            y.m(c, ocol) = best;
            if (ctx) ctx->argmax[static_cast<size_t>(ocol) * x.c + c] = best_idx;
          }
        }
      }
    }
    return y;
  }

  FeatureMap<T> backward(const FeatureMap<T>& gy, const Ctx& ctx) const {
    FeatureMap<T> gx(ctx.n, ctx.c, ctx.h, ctx.w);
    for (Eigen::Index ocol = 0; ocol < gy.m.cols(); ++ocol)
      for (int c = 0; c < ctx.c; ++c)
        gx.m(c, ctx.argmax[static_cast<size_t>(ocol) * ctx.c + c]) += gy.m(c, ocol);
    return gx;
  }
};

template <typename T>
struct Relu {
  struct Ctx {
    Mat<T> mask;
  };

  static Mat<T> forward(const Mat<T>& x, Ctx* ctx) {
    Mat<T> y = x.cwiseMax(T(0));
    if (ctx) ctx->mask = (x.array() > T(0)).template cast<T>().matrix();
    return y;
  }
  static Mat<T> backward(const Mat<T>& gy, const Ctx& ctx) {
    return gy.cwiseProduct(ctx.mask);
  }
};

template <typename T>
struct SigmoidOp {
  struct Ctx {
    Mat<T> y;
  };

  static Mat<T> forward(const Mat<T>& x, Ctx* ctx) {
    Mat<T> y = ((-x.array()).exp() + T(1)).inverse().matrix();
    if (ctx) ctx->y = y;
    return y;
  }
  static Mat<T> backward(const Mat<T>& gy, const Ctx& ctx) {
    return gy.array() * ctx.y.array() * (T(1) - ctx.y.array());
  }
};

/// Inverted dropout; identity when not training.
template <typename T>
class Dropout {
 public:
  explicit Dropout(double keep_probability) : keep_(keep_probability) {}

  struct Ctx {
    Mat<T> mask;
    bool active = false;
  };

  Mat<T> forward(const Mat<T>& x, bool training, Rng* rng, Ctx* ctx) const {
    if (!training) {
      if (ctx) ctx->active = false;
      return x;
    }
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Mat<T> mask(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < mask.size(); ++i)
      mask.data()[i] = uni(*rng) < keep_ ? static_cast<T>(1.0 / keep_) : T(0);
    if (ctx) {
      ctx->mask = mask;
      ctx->active = true;
    }
    return x.cwiseProduct(mask);
  }

  Mat<T> backward(const Mat<T>& gy, const Ctx& ctx) const {
    if (!ctx.active) return gy;
    return gy.cwiseProduct(ctx.mask);
  }

 private:
  double keep_;
};

/// (C, N*H*W) feature map -> (C*H*W, N) per-sample columns.
template <typename T>
Mat<T> flatten_per_sample(const FeatureMap<T>& x) {
  const Eigen::Index hw = static_cast<Eigen::Index>(x.h) * x.w;
  Mat<T> out(static_cast<Eigen::Index>(x.c) * hw, x.n);
  for (int n = 0; n < x.n; ++n)
    for (int c = 0; c < x.c; ++c)
      for (Eigen::Index p = 0; p < hw; ++p)
        out(static_cast<Eigen::Index>(c) * hw + p, n) = x.m(c, static_cast<Eigen::Index>(n) * hw + p);
  return out;
}

template <typename T>
FeatureMap<T> unflatten_per_sample(const Mat<T>& x, int c, int h, int w) {
  const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
  FeatureMap<T> out(static_cast<int>(x.cols()), c, h, w);
  for (int n = 0; n < out.n; ++n)
    for (int ci = 0; ci < c; ++ci)
      for (Eigen::Index p = 0; p < hw; ++p)
        out.m(ci, static_cast<Eigen::Index>(n) * hw + p) = x(static_cast<Eigen::Index>(ci) * hw + p, n);
  return out;
}

template <typename T>
FeatureMap<T> concat_channels(const FeatureMap<T>& a, const FeatureMap<T>& b) {
  if (a.n != b.n || a.h != b.h || a.w != b.w)
    throw std::invalid_argument("concat_channels: spatial dims differ");
  FeatureMap<T> out(a.n, a.c + b.c, a.h, a.w);
  out.m.topRows(a.c) = a.m;
  out.m.bottomRows(b.c) = b.m;
  return out;
}

template <typename T>
void split_channels(const FeatureMap<T>& g, int c_top, FeatureMap<T>& g_top,
                    FeatureMap<T>& g_bottom) {
  g_top = FeatureMap<T>(g.n, c_top, g.h, g.w);
  g_bottom = FeatureMap<T>(g.n, g.c - c_top, g.h, g.w);
  g_top.m = g.m.topRows(c_top);
  g_bottom.m = g.m.bottomRows(g.c - c_top);
}

/// Mean per-sample soft Dice loss over a batch of single-channel probability
/// maps, with its gradient w.r.t. the probabilities.
template <typename T>
struct SoftDiceBatchLoss {
  static T value_and_grad(const FeatureMap<T>& pred,
                          const std::vector<std::vector<std::uint8_t>>& targets, T eps,
                          FeatureMap<T>* grad) {
    const Eigen::Index hw = static_cast<Eigen::Index>(pred.h) * pred.w;
    if (grad) *grad = FeatureMap<T>(pred.n, 1, pred.h, pred.w);
    T total = 0;
    for (int n = 0; n < pred.n; ++n) {
      T inter = 0, psum = 0, tsum = 0;
      const T* p = pred.m.data() + static_cast<Eigen::Index>(n) * hw;
      const std::uint8_t* t = targets[n].data();
      for (Eigen::Index i = 0; i < hw; ++i) {
        inter += p[i] * static_cast<T>(t[i]);
        psum += p[i];
        tsum += static_cast<T>(t[i]);
      }
      const T denom = psum + tsum + eps;
      const T numer = T(2) * inter + eps;
      total += T(1) - numer / denom;
      if (grad) {
        T* g = grad->m.data() + static_cast<Eigen::Index>(n) * hw;
        const T scale = T(1) / static_cast<T>(pred.n);
        for (Eigen::Index i = 0; i < hw; ++i)
          g[i] = -scale * (T(2) * static_cast<T>(t[i]) * denom - numer) / (denom * denom);
      }
    }
    return total / static_cast<T>(pred.n);
  }
};

}  // namespace shapeprior::nn
