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

#pragma once

#include <cstddef>
#include <vector>

namespace delkm {

/// Two-sample Kolmogorov-Smirnov test. The statistic is the exact supremum
/// gap between the two empirical CDFs (ties handled by advancing both sides
/// through equal values together). The decision uses the classic critical
/// value c(alpha) * sqrt((n1+n2)/(n1*n2)) with c(alpha) = sqrt(-ln(alpha/2)/2);
/// the asymptotic p-value is reported alongside.
struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;
  double p_value = 1.0;
  bool pass = false;  // true when the samples are consistent at level alpha
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

KsResult ks_two_sample(std::vector<double> sample1, std::vector<double> sample2,
                       double alpha);

}  // namespace delkm
