// shapeprior/nn/adam.hpp
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
#include <vector>

#include "shapeprior/nn/core.hpp"

namespace shapeprior::nn {

/// Adaptive-moment gradient descent with the conventional moment constants.
template <typename T>
class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  void step(const std::vector<Param<T>*>& params) {
    if (m_.empty()) {
      for (auto* p : params) {
        m_.emplace_back(Mat<T>::Zero(p->value.rows(), p->value.cols()));
        v_.emplace_back(Mat<T>::Zero(p->value.rows(), p->value.cols()));
      }
    }
    ++t_;
    const T c1 = static_cast<T>(1.0 - std::pow(beta1_, t_));
    const T c2 = static_cast<T>(1.0 - std::pow(beta2_, t_));
    for (size_t i = 0; i < params.size(); ++i) {
      auto& p = *params[i];
      m_[i] = static_cast<T>(beta1_) * m_[i] + static_cast<T>(1.0 - beta1_) * p.grad;
      v_[i].array() = static_cast<T>(beta2_) * v_[i].array() +
                      static_cast<T>(1.0 - beta2_) * p.grad.array().square();
      p.value.array() -= static_cast<T>(lr_) * (m_[i].array() / c1) /
                         ((v_[i].array() / c2).sqrt() + static_cast<T>(eps_));
      p.grad.setZero();
    }
  }

  void set_learning_rate(double lr) { lr_ = lr; }
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Mat<T>> m_, v_;
};

}  // namespace shapeprior::nn
