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

// AVX2 kernel variants. This translation unit is compiled with -mavx2 and is
// only entered after a runtime CPU check. Separate mul + add (no FMA) keeps
// each lane's rounding identical to the scalar reference.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstddef>

namespace delkm::kernels::detail {

double squared_l2_avx2(const double* a, const double* b, std::size_t d) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= d; j += 4) {
    const __m256d va = _mm256_loadu_pd(a + j);
    const __m256d vb = _mm256_loadu_pd(b + j);
    const __m256d diff = _mm256_sub_pd(va, vb);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double tail = 0.0;
  for (; j < d; ++j) {
    const double t = a[j] - b[j];
    tail += t * t;
  }
  // Same combine order as the scalar reference.
  return ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) + tail;
}

void add_into_avx2(double* acc, const double* x, std::size_t d) {
  std::size_t j = 0;
  for (; j + 4 <= d; j += 4) {
    const __m256d va = _mm256_loadu_pd(acc + j);
    const __m256d vx = _mm256_loadu_pd(x + j);
    _mm256_storeu_pd(acc + j, _mm256_add_pd(va, vx));
  }
  for (; j < d; ++j) acc[j] += x[j];
}

}  // namespace delkm::kernels::detail

#endif  // x86_64
