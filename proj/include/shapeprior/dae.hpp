// shapeprior/dae.hpp
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

#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "shapeprior/image.hpp"
#include "shapeprior/mask.hpp"
#include "shapeprior/metrics.hpp"
#include "shapeprior/nn/adam.hpp"
#include "shapeprior/nn/checkpoint.hpp"
#include "shapeprior/nn/layers.hpp"
#include "shapeprior/rng.hpp"

namespace shapeprior {

/// Denoising-autoencoder topology: five stride-2 encoder stages
/// (16,32,32,32,32 kernels; stages 1-4 followed by a stride-1 conv), a
/// linear fully connected code, a fully connected expansion back to a
/// single-channel (input/32)^2 grid, and five resolution-doubling decoder
/// stages of 16 kernels with a final 1-channel sigmoid conv.
struct DAEArchitectureSpec {
  int input_size = 1024;  // square, divisible by 32
  int code_width = 512;

  int grid() const { return input_size / 32; }

  void validate() const {
    if (input_size < 32 || input_size % 32 != 0)
      throw InvalidSpec("DAE input_size must be a positive multiple of 32");
    if (code_width < 1) throw InvalidSpec("DAE code_width must be >= 1");
  }

  nlohmann::json to_json() const {
    return {{"model", "dae"}, {"input_size", input_size}, {"code_width", code_width}};
  }
  static DAEArchitectureSpec from_json(const nlohmann::json& j) {
    DAEArchitectureSpec s;
    s.input_size = j.at("input_size").get<int>();
    s.code_width = j.at("code_width").get<int>();
    s.validate();
    return s;
  }
};

struct DAETrainConfig {
  double learning_rate = 0.0001;
  int batch_size = 15;
  int epochs = 150;
  double loss_epsilon = 1.0;
  DegradationConfig degradation;
  std::uint64_t seed = 0;
};

template <typename T>
class DAENetwork {
 public:
  explicit DAENetwork(const DAEArchitectureSpec& spec)
      : spec_(spec),
        e1a_("enc1a", 1, 16, 3, 2), e1b_("enc1b", 16, 16, 3, 1),
        e2a_("enc2a", 16, 32, 3, 2), e2b_("enc2b", 32, 32, 3, 1),
        e3a_("enc3a", 32, 32, 3, 2), e3b_("enc3b", 32, 32, 3, 1),
        e4a_("enc4a", 32, 32, 3, 2), e4b_("enc4b", 32, 32, 3, 1),
        e5_("enc5", 32, 32, 3, 2),
        fc_code_("code", 32 * spec.grid() * spec.grid(), spec.code_width),
        fc_expand_("expand", spec.code_width, spec.grid() * spec.grid()),
        d1_("dec1.up", 1, 16), d1c_("dec1.conv", 16, 16, 3, 1),
        d2_("dec2.up", 16, 16), d2c_("dec2.conv", 16, 16, 3, 1),
        d3_("dec3.up", 16, 16), d3c_("dec3.conv", 16, 16, 3, 1),
        d4_("dec4.up", 16, 16), d4c_("dec4.conv", 16, 16, 3, 1),
        d5_("dec5.up", 16, 16), d5c_("dec5.conv", 16, 1, 3, 1) {
    spec_.validate();
  }

  void init(std::uint64_t seed) {
    nn::Rng rng(seed);
    e1a_.init(rng); e1b_.init(rng);
    e2a_.init(rng); e2b_.init(rng);
    e3a_.init(rng); e3b_.init(rng);
    e4a_.init(rng); e4b_.init(rng);
    e5_.init(rng);
    fc_code_.init(rng);
    fc_expand_.init(rng);
    d1_.init(rng); d1c_.init(rng);
    d2_.init(rng); d2c_.init(rng);
    d3_.init(rng); d3c_.init(rng);
    d4_.init(rng); d4c_.init(rng);
    d5_.init(rng); d5c_.init(rng);
  }

  struct EncCtx {
    typename nn::Conv2d<T>::Ctx c1a, c1b, c2a, c2b, c3a, c3b, c4a, c4b, c5;
    typename nn::Relu<T>::Ctx r1a, r1b, r2a, r2b, r3a, r3b, r4a, r4b, r5;
    typename nn::Dense<T>::Ctx fc;
    nn::FeatureMap<T> pre_flatten;  // dims of the map feeding the flatten
  };

  struct DecCtx {
    typename nn::Dense<T>::Ctx fc;
    typename nn::Relu<T>::Ctx rfc, r1u, r1c, r2u, r2c, r3u, r3c, r4u, r4c, r5u;
    typename nn::ConvTranspose2d<T>::Ctx u1, u2, u3, u4, u5;
    typename nn::Conv2d<T>::Ctx c1, c2, c3, c4, c5;
    typename nn::SigmoidOp<T>::Ctx sig;
  };

  struct FwdCtx {
    EncCtx enc;
    DecCtx dec;
  };

  /// f_enc: masks to code columns, one sample per column.
  nn::Mat<T> encode(const nn::FeatureMap<T>& x, EncCtx* ctx) const {
    auto relu = [](nn::FeatureMap<T> f, typename nn::Relu<T>::Ctx* c) {
      f.m = nn::Relu<T>::forward(f.m, c);
      return f;
    };
    auto* e = ctx;
    auto h = relu(e1a_.forward(x, e ? &e->c1a : nullptr), e ? &e->r1a : nullptr);
    h = relu(e1b_.forward(h, e ? &e->c1b : nullptr), e ? &e->r1b : nullptr);
    h = relu(e2a_.forward(h, e ? &e->c2a : nullptr), e ? &e->r2a : nullptr);
    h = relu(e2b_.forward(h, e ? &e->c2b : nullptr), e ? &e->r2b : nullptr);
    h = relu(e3a_.forward(h, e ? &e->c3a : nullptr), e ? &e->r3a : nullptr);
    h = relu(e3b_.forward(h, e ? &e->c3b : nullptr), e ? &e->r3b : nullptr);
    h = relu(e4a_.forward(h, e ? &e->c4a : nullptr), e ? &e->r4a : nullptr);
    h = relu(e4b_.forward(h, e ? &e->c4b : nullptr), e ? &e->r4b : nullptr);
    h = relu(e5_.forward(h, e ? &e->c5 : nullptr), e ? &e->r5 : nullptr);
    if (e) {
      e->pre_flatten.n = h.n;
      e->pre_flatten.c = h.c;
      e->pre_flatten.h = h.h;
      e->pre_flatten.w = h.w;
    }
    return fc_code_.forward(nn::flatten_per_sample(h), e ? &e->fc : nullptr);
  }

  /// f_dec: code columns back to probability maps of the input size.
  nn::FeatureMap<T> decode(const nn::Mat<T>& code, DecCtx* ctx) const {
    auto relu_fm = [](nn::FeatureMap<T> f, typename nn::Relu<T>::Ctx* c) {
      f.m = nn::Relu<T>::forward(f.m, c);
      return f;
    };
    auto* d = ctx;
    nn::Mat<T> expanded = fc_expand_.forward(code, d ? &d->fc : nullptr);
    expanded = nn::Relu<T>::forward(expanded, d ? &d->rfc : nullptr);
    const int g = spec_.grid();
    auto h = nn::unflatten_per_sample(expanded, 1, g, g);
    h = relu_fm(d1_.forward(h, d ? &d->u1 : nullptr), d ? &d->r1u : nullptr);
    h = relu_fm(d1c_.forward(h, d ? &d->c1 : nullptr), d ? &d->r1c : nullptr);
    h = relu_fm(d2_.forward(h, d ? &d->u2 : nullptr), d ? &d->r2u : nullptr);
    h = relu_fm(d2c_.forward(h, d ? &d->c2 : nullptr), d ? &d->r2c : nullptr);
    h = relu_fm(d3_.forward(h, d ? &d->u3 : nullptr), d ? &d->r3u : nullptr);
    h = relu_fm(d3c_.forward(h, d ? &d->c3 : nullptr), d ? &d->r3c : nullptr);
    h = relu_fm(d4_.forward(h, d ? &d->u4 : nullptr), d ? &d->r4u : nullptr);
    h = relu_fm(d4c_.forward(h, d ? &d->c4 : nullptr), d ? &d->r4c : nullptr);
    h = relu_fm(d5_.forward(h, d ? &d->u5 : nullptr), d ? &d->r5u : nullptr);
    h = d5c_.forward(h, d ? &d->c5 : nullptr);
    h.m = nn::SigmoidOp<T>::forward(h.m, d ? &d->sig : nullptr);
    return h;
  }

  nn::FeatureMap<T> forward(const nn::FeatureMap<T>& x, FwdCtx* ctx) const {
    auto code = encode(x, ctx ? &ctx->enc : nullptr);
    return decode(code, ctx ? &ctx->dec : nullptr);
  }

  void backward(const nn::FeatureMap<T>& gout, FwdCtx& ctx) {
    nn::Mat<T> gcode = decode_backward(gout, ctx.dec);
    encode_backward(gcode, ctx.enc);
  }

  nn::Mat<T> decode_backward(const nn::FeatureMap<T>& gout, DecCtx& d) {
    nn::FeatureMap<T> g = gout;
    g.m = nn::SigmoidOp<T>::backward(g.m, d.sig);
    g = d5c_.backward(g, d.c5);
    g.m = nn::Relu<T>::backward(g.m, d.r5u);
    g = d5_.backward(g, d.u5);
    g.m = nn::Relu<T>::backward(g.m, d.r4c);
    g = d4c_.backward(g, d.c4);
    g.m = nn::Relu<T>::backward(g.m, d.r4u);
    g = d4_.backward(g, d.u4);
    g.m = nn::Relu<T>::backward(g.m, d.r3c);
    g = d3c_.backward(g, d.c3);
    g.m = nn::Relu<T>::backward(g.m, d.r3u);
    g = d3_.backward(g, d.u3);
    g.m = nn::Relu<T>::backward(g.m, d.r2c);
    g = d2c_.backward(g, d.c2);
    g.m = nn::Relu<T>::backward(g.m, d.r2u);
    g = d2_.backward(g, d.u2);
    g.m = nn::Relu<T>::backward(g.m, d.r1c);
    g = d1c_.backward(g, d.c1);
    g.m = nn::Relu<T>::backward(g.m, d.r1u);
    g = d1_.backward(g, d.u1);
    nn::Mat<T> gflat = nn::flatten_per_sample(g);  // (grid^2, N) since c == 1
    gflat = nn::Relu<T>::backward(gflat, d.rfc);
    return fc_expand_.backward(gflat, d.fc);
  }

  void encode_backward(const nn::Mat<T>& gcode, EncCtx& e) {
    nn::Mat<T> gflat = fc_code_.backward(gcode, e.fc);
    nn::FeatureMap<T> g = nn::unflatten_per_sample(gflat, e.pre_flatten.c,
                                                   e.pre_flatten.h, e.pre_flatten.w);
    g.m = nn::Relu<T>::backward(g.m, e.r5);
    g = e5_.backward(g, e.c5);
    g.m = nn::Relu<T>::backward(g.m, e.r4b);
    g = e4b_.backward(g, e.c4b);
    g.m = nn::Relu<T>::backward(g.m, e.r4a);
    g = e4a_.backward(g, e.c4a);
    g.m = nn::Relu<T>::backward(g.m, e.r3b);
    g = e3b_.backward(g, e.c3b);
    g.m = nn::Relu<T>::backward(g.m, e.r3a);
    g = e3a_.backward(g, e.c3a);
    g.m = nn::Relu<T>::backward(g.m, e.r2b);
    g = e2b_.backward(g, e.c2b);
    g.m = nn::Relu<T>::backward(g.m, e.r2a);
    g = e2a_.backward(g, e.c2a);
    g.m = nn::Relu<T>::backward(g.m, e.r1b);
    g = e1b_.backward(g, e.c1b);
    g.m = nn::Relu<T>::backward(g.m, e.r1a);
    e1a_.backward(g, e.c1a);
  }

  std::vector<nn::Param<T>*> params() {
    std::vector<nn::Param<T>*> out;
    for (auto* layer_params : {&e1a_, &e1b_, &e2a_, &e2b_, &e3a_, &e3b_, &e4a_, &e4b_, &e5_})
      for (auto* p : layer_params->params()) out.push_back(p);
    for (auto* p : fc_code_.params()) out.push_back(p);
    for (auto* p : fc_expand_.params()) out.push_back(p);
    for (auto* up : {&d1_, &d2_, &d3_, &d4_, &d5_})
      for (auto* p : up->params()) out.push_back(p);
    for (auto* conv : {&d1c_, &d2c_, &d3c_, &d4c_, &d5c_})
      for (auto* p : conv->params()) out.push_back(p);
    return out;
  }

  const DAEArchitectureSpec& spec() const { return spec_; }

 private:
  DAEArchitectureSpec spec_;
  nn::Conv2d<T> e1a_, e1b_, e2a_, e2b_, e3a_, e3b_, e4a_, e4b_, e5_;
  nn::Dense<T> fc_code_, fc_expand_;
  nn::ConvTranspose2d<T> d1_;
  nn::Conv2d<T> d1c_;
  nn::ConvTranspose2d<T> d2_;
  nn::Conv2d<T> d2c_;
  nn::ConvTranspose2d<T> d3_;
  nn::Conv2d<T> d3c_;
  nn::ConvTranspose2d<T> d4_;
  nn::Conv2d<T> d4c_;
  nn::ConvTranspose2d<T> d5_;
  nn::Conv2d<T> d5c_;
};

/// Packs a batch of masks into a single-channel feature map.
template <typename T>
nn::FeatureMap<T> masks_to_feature(const std::vector<const BinaryMask*>& masks) {
  const int s = masks.at(0)->height();
  nn::FeatureMap<T> fm(static_cast<int>(masks.size()), 1, s, masks.at(0)->width());
  const Eigen::Index hw = static_cast<Eigen::Index>(fm.h) * fm.w;
  for (size_t n = 0; n < masks.size(); ++n)
    for (Eigen::Index p = 0; p < hw; ++p)
      fm.m(0, static_cast<Eigen::Index>(n) * hw + p) = static_cast<T>(masks[n]->pixels()[p]);
  return fm;
}

/// Shape-prior model: the trained DAE plus its inference path.
class DAEModel {
 public:
  DAEModel(const DAEArchitectureSpec& spec, std::uint64_t seed);

  static DAEModel load(const std::string& dir);
  void save(const std::string& dir) const;

  std::vector<float> encode(const BinaryMask& mask) const;
  ProbabilityMap decode(const std::vector<float>& code) const;
  ProbabilityMap reconstruct(const BinaryMask& mask) const;
  /// decode(encode(mask)) binarized at threshold (p >= threshold -> fg).
  BinaryMask postprocess(const BinaryMask& mask, double threshold = 0.5) const;

  using ProgressFn = std::function<void(int epoch, double mean_loss)>;
  void train(const std::vector<BinaryMask>& masks, const DAETrainConfig& cfg,
             const ProgressFn& progress = nullptr);

  const DAEArchitectureSpec& spec() const { return net_.spec(); }
  int epoch() const { return epoch_; }
  const std::vector<double>& loss_history() const { return loss_history_; }
  DAENetwork<float>& network() { return net_; }
  const DAENetwork<float>& network() const { return net_; }

 private:
  DAENetwork<float> net_;
  int epoch_ = 0;
  std::vector<double> loss_history_;
};

}  // namespace shapeprior
