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

namespace delkm {

// Rule-of-thumb parameter choices, so models can be configured without a
// tuning run that would itself depend on individual data points.

/// Power of two closest to x (linear distance, ties upward). x must be >= 1.
std::size_t nearest_pow2(double x);

/// Quantization granularity 2^round(-log10(n / (k * d^1.5)) - 3), the
/// rounding being half-to-even on the exponent.
double heuristic_epsilon(std::size_t n, std::size_t k, std::size_t d);

/// Tree width: n^0.3 rounded to the nearest power of two.
std::size_t heuristic_width(std::size_t n);

}  // namespace delkm
