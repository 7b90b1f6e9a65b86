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

#include "delkm/heuristics.hpp"

#include <cmath>

#include "delkm/errors.hpp"

namespace delkm {

std::size_t nearest_pow2(double x) {
  if (!(x >= 1.0)) throw DataError("nearest_pow2: argument must be >= 1");
  std::size_t lower = 1;
  while (static_cast<double>(lower) * 2.0 <= x) lower *= 2;
  const std::size_t upper = lower * 2;
  const double down = x - static_cast<double>(lower);
  const double up = static_cast<double>(upper) - x;
  return (up <= down) ? upper : lower;
}

double heuristic_epsilon(std::size_t n, std::size_t k, std::size_t d) {
  if (n == 0 || k == 0 || d == 0)
    throw DataError("heuristic_epsilon: arguments must be >= 1");
  const double mass = static_cast<double>(n) /
                      (static_cast<double>(k) * std::pow(static_cast<double>(d), 1.5));
  // std::nearbyint rounds half-to-even under the default rounding mode.
  const double exponent = std::nearbyint(-std::log10(mass) - 3.0);
  return std::ldexp(1.0, static_cast<int>(exponent));
}

std::size_t heuristic_width(std::size_t n) {
  if (n == 0) throw DataError("heuristic_width: n must be >= 1");
  return nearest_pow2(std::pow(static_cast<double>(n), 0.3));
}

}  // namespace delkm
