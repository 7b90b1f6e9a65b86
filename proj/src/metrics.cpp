/*
 * Copyright (c) 2026, the delkm authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "delkm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "delkm/errors.hpp"
#include "delkm/kernels.hpp"
#include "delkm/parallel.hpp"

namespace delkm {

double silhouette(const DataMatrix& data, const Assignment& assignment,
                  std::size_t sample_cap, RngStream& rng) {
  if (sample_cap == 0) throw DataError("silhouette: sample_cap must be >= 1");
  std::vector<RowId> ids = data.live_ids();
  if (ids.size() > sample_cap) {
    // Partial Fisher-Yates: the first sample_cap entries become a uniform
    // sample without replacement.
    for (std::size_t i = 0; i < sample_cap; ++i) {
      const std::size_t j = i + rng.uniform_below(ids.size() - i);
      std::swap(ids[i], ids[j]);
    }
    ids.resize(sample_cap);
  }

  const std::size_t m = ids.size();
  const std::size_t k = assignment.sizes.size();
  const std::size_t d = data.dim();

  std::vector<std::uint32_t> label(m);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint32_t c = assignment.cluster_of[ids[i]];
    if (c >= k) throw DataError("silhouette: row without a cluster");
    label[i] = c;
    ++count[c];
  }
  std::size_t non_empty = 0;
  for (std::size_t c = 0; c < k; ++c) non_empty += (count[c] > 0);
  if (non_empty < 2)
    throw DataError("silhouette: needs at least 2 non-empty clusters");

  // sums[i*k + c] = total distance from point i to the sampled points of
  // cluster c. Each point only writes its own row, so the block-parallel
  // path is race-free and bitwise equal to the sequential one.
  std::vector<double> sums(m * k, 0.0);
  const std::size_t blocks = (max_threads() > 1 && m >= 512) ? 64 : 1;
  run_blocks(blocks, [&](std::size_t b) {
    const auto range = block_range(m, blocks, b);
    for (std::size_t i = range.begin; i < range.end; ++i) {
      const double* pi = data.point(ids[i]);
      double* row = sums.data() + i * k;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        row[label[j]] += kernels::l2(pi, data.point(ids[j]), d);
      }
    }
  });

  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint32_t own = label[i];
    if (count[own] <= 1) continue;  // singleton scores 0
    const double a = sums[i * k + own] / static_cast<double>(count[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own || count[c] == 0) continue;
      const double mean = sums[i * k + c] / static_cast<double>(count[c]);
      if (mean < b) b = mean;
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(m);
}

namespace {

std::vector<int> compress_labels(const std::vector<int>& labels, std::size_t& classes) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto [it, fresh] =
        remap.try_emplace(labels[i], static_cast<int>(remap.size()));
    out[i] = it->second;
    (void)fresh;
  }
  classes = remap.size();
  return out;
}

}  // namespace

double nmi(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.empty()) throw DataError("nmi: empty input");
  if (predicted.size() != truth.size())
    throw DataError("nmi: label sequences have different lengths");

  std::size_t a_classes = 0, b_classes = 0;
  const std::vector<int> a = compress_labels(predicted, a_classes);
  const std::vector<int> b = compress_labels(truth, b_classes);
  if (a_classes == 1 && b_classes == 1) return 1.0;
  if (a_classes == 1 || b_classes == 1) return 0.0;

  const double n = static_cast<double>(a.size());
  std::vector<double> joint(a_classes * b_classes, 0.0);
  std::vector<double> pa(a_classes, 0.0), pb(b_classes, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[a[i] * b_classes + b[i]] += 1.0;
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
  }

  double mi = 0.0, ha = 0.0, hb = 0.0;
  for (double& v : pa) {
    v /= n;
    if (v > 0.0) ha -= v * std::log(v);
  }
  for (double& v : pb) {
    v /= n;
    if (v > 0.0) hb -= v * std::log(v);
  }
  for (std::size_t i = 0; i < a_classes; ++i) {
    for (std::size_t j = 0; j < b_classes; ++j) {
      const double p = joint[i * b_classes + j] / n;
      if (p > 0.0) mi += p * std::log(p / (pa[i] * pb[j]));
    }
  }
  const double value = mi / (0.5 * (ha + hb));
  return std::clamp(value, 0.0, 1.0);
}

double loss_ratio(double method_loss, double baseline_loss) {
  if (!(baseline_loss > 0.0))
    throw DataError("loss_ratio: baseline loss must be > 0");
  return method_loss / baseline_loss;
}

}  // namespace delkm
