// shapeprior/metrics.cpp
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
// limitations under the license.

#include "shapeprior/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace shapeprior {

double dice(const BinaryMask& a, const BinaryMask& b) {
  if (a.height() != b.height() || a.width() != b.width())
    throw DimensionMismatch("dice: mask dimensions differ");
  long inter = 0, sum = 0;
  for (size_t i = 0; i < a.pixels().size(); ++i) {
    inter += a.pixels()[i] & b.pixels()[i];
    sum += a.pixels()[i] + b.pixels()[i];
  }
  if (sum == 0) return 1.0;  // both empty: perfect agreement on "nothing"
  return 2.0 * static_cast<double>(inter) / static_cast<double>(sum);
}

double soft_dice_loss(const ProbabilityMap& pred, const BinaryMask& target,
                      double epsilon) {
  if (pred.height != target.height() || pred.width != target.width())
    throw DimensionMismatch("soft_dice_loss: dimensions differ");
  for (float v : pred.values)
    if (!(v >= 0.f && v <= 1.f))
      throw InvalidProbability("soft_dice_loss: prediction outside [0,1]");
  std::vector<double> p(pred.values.begin(), pred.values.end());
  return soft_dice_loss_core<double>(p.data(), target.pixels().data(), p.size(), epsilon);
}

namespace {

// Directed distances: for each boundary point of `from`, the min Euclidean
// distance to the boundary of `to`.
std::vector<double> directed_boundary_distances(const std::vector<PixelCoord>& from,
                                                const std::vector<PixelCoord>& to) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) {
      const double dy = p.row - q.row, dx = p.col - q.col;
      const double d2 = dy * dy + dx * dx;
      if (d2 < best) best = d2;
    }
    out.push_back(std::sqrt(best));
  }
  return out;
}

}  // namespace

double hausdorff(const BinaryMask& a, const BinaryMask& b) {
  if (a.height() != b.height() || a.width() != b.width())
    throw DimensionMismatch("hausdorff: mask dimensions differ");
  const auto ba = boundary(a);
  const auto bb = boundary(b);
  if (ba.empty() || bb.empty())
    throw EmptyMask("hausdorff: mask has no foreground");
  double h = 0;
  for (double d : directed_boundary_distances(ba, bb)) h = std::max(h, d);
  for (double d : directed_boundary_distances(bb, ba)) h = std::max(h, d);
  return h;
}

double hausdorff_percentile(const BinaryMask& a, const BinaryMask& b,
                            double percentile) {
  if (a.height() != b.height() || a.width() != b.width())
    throw DimensionMismatch("hausdorff_percentile: mask dimensions differ");
  if (!(percentile > 0.0 && percentile <= 1.0))
    throw std::invalid_argument("hausdorff_percentile: percentile must be in (0,1]");
  const auto ba = boundary(a);
  const auto bb = boundary(b);
  if (ba.empty() || bb.empty())
    throw EmptyMask("hausdorff_percentile: mask has no foreground");
  auto pick = [percentile](std::vector<double> d) {
    std::sort(d.begin(), d.end());
    const size_t idx = std::min(d.size() - 1,
                                static_cast<size_t>(std::ceil(percentile * d.size())) - 1);
    return d[idx];
  };
  return std::max(pick(directed_boundary_distances(ba, bb)),
                  pick(directed_boundary_distances(bb, ba)));
}

namespace {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const PairedSampleSet& pairs) {
  if (pairs.values_a.size() != pairs.values_b.size())
    throw DimensionMismatch("wilcoxon_signed_rank: sample lengths differ");

  std::vector<double> diffs;
  for (size_t i = 0; i < pairs.values_a.size(); ++i) {
    const double d = pairs.values_a[i] - pairs.values_b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const int n = static_cast<int>(diffs.size());
  if (n < 5)
    throw TooFewSamples("wilcoxon_signed_rank: need >= 5 nonzero differences, have " +
                        std::to_string(n));

  // Rank |d| ascending with average ranks for ties.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(diffs[i]) < std::abs(diffs[j]);
  });
  std::vector<double> rank(n, 0.0);
  std::vector<double> tie_sizes;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) ++j;
    const double avg = (i + 1 + j) / 2.0;  // average of ranks i+1 .. j
    for (int k = i; k < j; ++k) rank[order[k]] = avg;
    tie_sizes.push_back(j - i);
    i = j;
  }

  double w_plus = 0;
  for (int i = 0; i < n; ++i)
    if (diffs[i] > 0) w_plus += rank[i];

  WilcoxonResult res;
  res.n = n;
  res.w_plus = w_plus;

  if (n <= 25) {
    // Exact null distribution of W+ over all 2^n sign assignments, tabulated
    // over doubled ranks so that tied (half-integer) ranks stay integral.
    const int total = n * (n + 1);  // sum of doubled ranks
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    for (int i = 0; i < n; ++i) {
      const int r2 = static_cast<int>(std::lround(2.0 * rank[i]));
      for (int s = total; s >= r2; --s) count[s] += count[s - r2];
    }
    const double denom = std::pow(2.0, n);
    const int w2 = static_cast<int>(std::lround(2.0 * w_plus));
    double p_le = 0, p_ge = 0;
    for (int s = 0; s <= total; ++s) {
      if (s <= w2) p_le += count[s];
      if (s >= w2) p_ge += count[s];
    }
    res.exact = true;
    res.p_value = std::min(1.0, 2.0 * std::min(p_le, p_ge) / denom);
  } else {
    const double mu = n * (n + 1) / 4.0;
    double tie_corr = 0;
    for (double t : tie_sizes) tie_corr += (t * t * t - t);
    const double sigma2 = n * (n + 1) * (2.0 * n + 1) / 24.0 - tie_corr / 48.0;
    const double sigma = std::sqrt(sigma2);
    const double cc = std::min(0.5, std::abs(w_plus - mu));  // continuity correction
    const double z = (std::abs(w_plus - mu) - cc) / sigma;
    res.exact = false;
    res.p_value = std::min(1.0, 2.0 * normal_sf(z));
  }
  if (res.p_value <= 0.0) res.p_value = std::numeric_limits<double>::min();
  return res;
}

std::string to_csv_row(const EvalRecord& rec) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f", rec.dice, rec.hausdorff_px,
                rec.hausdorff_mm, rec.runtime_s);
  return rec.image_id + "," + rec.method + "," + rec.stage + "," + rec.postproc + "," + buf;
}

std::vector<EvalRecord> parse_eval_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kEvalCsvHeader)
    throw SchemaError("CSV header mismatch in " + path);
  std::vector<EvalRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8) throw SchemaError("bad CSV row: " + line);
    EvalRecord rec;
    rec.image_id = fields[0];
    rec.method = fields[1];
    rec.stage = fields[2];
    rec.postproc = fields[3];
    rec.dice = std::stod(fields[4]);
    rec.hausdorff_px = std::stod(fields[5]);
    rec.hausdorff_mm = std::stod(fields[6]);
    rec.runtime_s = std::stod(fields[7]);
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw SchemaError("CSV has no data rows: " + path);
  return out;
}

void write_eval_csv(const std::string& path, const std::vector<EvalRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open CSV for writing: " + path);
  out << kEvalCsvHeader << "\n";
  for (const auto& rec : records) out << to_csv_row(rec) << "\n";
}

}  // namespace shapeprior
