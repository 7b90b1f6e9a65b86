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

#include "delkm/stats.hpp"

#include <algorithm>
#include <cmath>

#include "delkm/errors.hpp"

namespace delkm {

namespace {

/// Asymptotic survival function of the Kolmogorov distribution,
/// Q(lambda) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> sample1, std::vector<double> sample2,
                       double alpha) {
  if (sample1.empty() || sample2.empty())
    throw DataError("ks_two_sample: empty sample");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DataError("ks_two_sample: alpha must be in (0, 1)");

  std::sort(sample1.begin(), sample1.end());
  std::sort(sample2.begin(), sample2.end());
  const std::size_t n1 = sample1.size();
  const std::size_t n2 = sample2.size();

  double statistic = 0.0;
  std::size_t i = 0, j = 0;
  while (i < n1 && j < n2) {
    const double x = std::min(sample1[i], sample2[j]);
    while (i < n1 && sample1[i] == x) ++i;
    while (j < n2 && sample2[j] == x) ++j;
    const double gap = std::fabs(static_cast<double>(i) / n1 -
                                 static_cast<double>(j) / n2);
    if (gap > statistic) statistic = gap;
  }

  KsResult r;
  r.statistic = statistic;
  r.n1 = n1;
  r.n2 = n2;
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  r.threshold = c * std::sqrt(static_cast<double>(n1 + n2) /
                              (static_cast<double>(n1) * static_cast<double>(n2)));
  r.pass = statistic <= r.threshold;
  const double ne = std::sqrt(static_cast<double>(n1) * static_cast<double>(n2) /
                              static_cast<double>(n1 + n2));
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * statistic);
  return r;
}

}  // namespace delkm
