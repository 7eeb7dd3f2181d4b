// shapeprior/metrics.hpp
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

#include "shapeprior/errors.hpp"
#include "shapeprior/image.hpp"
#include "shapeprior/mask.hpp"

namespace shapeprior {

/// Overlap coefficient 2|A∩B| / (|A|+|B|). Two empty masks compare as 1.0.
double dice(const BinaryMask& a, const BinaryMask& b);

/// Differentiable Dice-based reconstruction loss over raw probabilities:
/// 1 - (2 Σ p·t + ε) / (Σ p + Σ t + ε). Callers that need gradients use the
/// templated core below.
double soft_dice_loss(const ProbabilityMap& pred, const BinaryMask& target,
                      double epsilon = 1.0);

template <typename T>
T soft_dice_loss_core(const T* pred, const std::uint8_t* target, size_t n, T eps) {
  T inter = 0, psum = 0, tsum = 0;
  for (size_t i = 0; i < n; ++i) {
    inter += pred[i] * static_cast<T>(target[i]);
    psum += pred[i];
    tsum += static_cast<T>(target[i]);
  }
  return T(1) - (T(2) * inter + eps) / (psum + tsum + eps);
}

/// d loss / d pred_j = -(2 t_j (Σp + Σt + ε) - (2 Σ p·t + ε)) / (Σp + Σt + ε)^2.
template <typename T>
void soft_dice_loss_grad(const T* pred, const std::uint8_t* target, size_t n, T eps,
                         T* grad) {
  T inter = 0, psum = 0, tsum = 0;
  for (size_t i = 0; i < n; ++i) {
    inter += pred[i] * static_cast<T>(target[i]);
    psum += pred[i];
    tsum += static_cast<T>(target[i]);
  }
  const T denom = psum + tsum + eps;
  const T numer = T(2) * inter + eps;
  for (size_t i = 0; i < n; ++i)
    grad[i] = -(T(2) * static_cast<T>(target[i]) * denom - numer) / (denom * denom);
}

/// Symmetric Hausdorff distance in pixels over boundary point sets. Throws
/// EmptyMask when either mask has no foreground.
double hausdorff(const BinaryMask& a, const BinaryMask& b);

/// Percentile variant (e.g. 0.95) over the pooled directed boundary distances.
double hausdorff_percentile(const BinaryMask& a, const BinaryMask& b, double percentile);

/// Two paired samples aligned by index.
struct PairedSampleSet {
  std::vector<double> values_a;
  std::vector<double> values_b;
};

struct WilcoxonResult {
  double p_value = 1.0;  // two-sided
  double w_plus = 0.0;   // signed-rank statistic (sum of positive-difference ranks)
  int n = 0;             // pairs remaining after dropping zero differences
  bool exact = false;    // exact null distribution vs normal approximation
};

/// Two-sided Wilcoxon signed-rank test on paired differences a_i - b_i. Zero
/// differences are dropped; ties get average ranks. Exact null distribution
/// for n <= 25, normal approximation with tie and continuity corrections
/// above. Throws TooFewSamples when fewer than 5 nonzero differences remain.
WilcoxonResult wilcoxon_signed_rank(const PairedSampleSet& pairs);

/// One evaluated (image, producer stage, post-processing arm) row.
struct EvalRecord {
  std::string image_id;
  std::string method;    // e.g. "unet", "rf"
  std::string stage;     // e.g. "unet-epoch-5", "unet-converged", "rf"
  std::string postproc;  // "none" | "post-dae" | "crf"
  double dice = 0;
  double hausdorff_px = 0;
  double hausdorff_mm = 0;
  double runtime_s = 0;
};

inline constexpr const char* kEvalCsvHeader =
    "image_id,method,stage,postproc,dice,hausdorff_px,hausdorff_mm,runtime_s";

std::string to_csv_row(const EvalRecord& rec);
std::vector<EvalRecord> parse_eval_csv(const std::string& path);
void write_eval_csv(const std::string& path, const std::vector<EvalRecord>& records);

}  // namespace shapeprior
