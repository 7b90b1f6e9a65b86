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

#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace delkm::oracle {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

double naive_loss(const DataMatrix& data, const std::vector<double>& centroids,
                  std::size_t k, std::size_t d) {
  double total = 0.0;
  data.for_each_live([&](RowId, const double* p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      best = std::min(best, sq_dist(p, centroids.data() + c * d, d));
    total += best;
  });
  return total;
}

double naive_wcss(const DataMatrix& data, const std::vector<std::uint32_t>& cluster_of,
                  std::size_t k) {
  const std::size_t d = data.dim();
  std::vector<double> sums(k * d, 0.0);
  std::vector<std::size_t> counts(k, 0);
  data.for_each_live([&](RowId id, const double* p) {
    const std::uint32_t c = cluster_of[id];
    for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += p[j];
    ++counts[c];
  });
  for (std::size_t c = 0; c < k; ++c)
    if (counts[c] > 0)
      for (std::size_t j = 0; j < d; ++j)
        sums[c * d + j] /= static_cast<double>(counts[c]);
  double total = 0.0;
  data.for_each_live([&](RowId id, const double* p) {
    total += sq_dist(p, sums.data() + cluster_of[id] * d, d);
  });
  return total;
}

double naive_silhouette(const DataMatrix& data, const std::vector<std::uint32_t>& cluster_of,
                        std::size_t k) {
  const std::size_t d = data.dim();
  const std::vector<RowId> ids = data.live_ids();
  const std::size_t n = ids.size();
  std::vector<std::size_t> counts(k, 0);
  for (RowId id : ids) ++counts[cluster_of[id]];

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t own = cluster_of[ids[i]];
    if (counts[own] <= 1) continue;
    std::vector<double> sum(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[cluster_of[ids[j]]] +=
          std::sqrt(sq_dist(data.point(ids[i]), data.point(ids[j]), d));
    }
    const double a = sum[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own || counts[c] == 0) continue;
      b = std::min(b, sum[c] / static_cast<double>(counts[c]));
    }
    const double m = std::max(a, b);
    total += m > 0.0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(n);
}

double exact_optimal_loss(const std::vector<double>& points, std::size_t n,
                          std::size_t d, std::size_t k) {
  if (n > 16) throw std::runtime_error("exact_optimal_loss: n too large");
  std::vector<std::uint32_t> labels(n, 0);
  double best = std::numeric_limits<double>::infinity();

  std::vector<double> sums(k * d);
  std::vector<std::size_t> counts(k);
  std::uint64_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= k;

  for (std::uint64_t code = 0; code < combos; ++code) {
    std::uint64_t rest = code;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<std::uint32_t>(rest % k);
      rest /= k;
    }
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j)
        sums[labels[i] * d + j] += points[i * d + j];
      ++counts[labels[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0)
        for (std::size_t j = 0; j < d; ++j)
          sums[c * d + j] /= static_cast<double>(counts[c]);
    double loss = 0.0;
    for (std::size_t i = 0; i < n && loss < best; ++i)
      loss += sq_dist(points.data() + i * d, sums.data() + labels[i] * d, d);
    if (loss < best) best = loss;
  }
  return best;
}

DataMatrix matrix_of(std::vector<double> values, std::size_t d) {
  return DataMatrix(std::move(values), d);
}

}  // namespace delkm::oracle
