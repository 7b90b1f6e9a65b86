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

#include "delkm/quantizer.hpp"

#include <cmath>

#include "delkm/errors.hpp"

namespace delkm {

std::vector<double> sample_phase(std::size_t d, RngStream& rng) {
  if (d == 0) throw DataError("sample_phase: dimension must be >= 1");
  std::vector<double> theta(d);
  for (double& t : theta) t = rng.uniform01() - 0.5;
  return theta;
}

void quantize(const double* x, double* out, std::size_t d, double epsilon,
              const double* theta) {
  if (!(epsilon > 0.0)) throw DataError("quantize: epsilon must be > 0");
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(x[j])) throw DataError("quantize: non-finite input");
    const double y = x[j] / epsilon - theta[j];
    // Nearest integer with half-way ties toward +infinity. floor(y) is exact
    // and so is y - floor(y), which makes the tie comparison exact as well.
    const double f = std::floor(y);
    const double index = (y - f >= 0.5) ? f + 1.0 : f;
    out[j] = epsilon * (theta[j] + index);
  }
}

std::vector<double> quantize(const std::vector<double>& x,
                             const LatticeQuantizer& q) {
  if (x.size() != q.theta.size())
    throw DataError("quantize: phase dimension does not match input");
  std::vector<double> out(x.size());
  quantize(x.data(), out.data(), x.size(), q.epsilon, q.theta.data());
  return out;
}

}  // namespace delkm
