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

// NEON kernel variants. Two 2-lane accumulators reproduce the reference's
// four-stripe order: acc01 holds stripes 0,1 and acc23 holds stripes 2,3.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstddef>

namespace delkm::kernels::detail {

double squared_l2_neon(const double* a, const double* b, std::size_t d) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 4 <= d; j += 4) {
    const float64x2_t d01 = vsubq_f64(vld1q_f64(a + j), vld1q_f64(b + j));
    const float64x2_t d23 = vsubq_f64(vld1q_f64(a + j + 2), vld1q_f64(b + j + 2));
    acc01 = vaddq_f64(acc01, vmulq_f64(d01, d01));
    acc23 = vaddq_f64(acc23, vmulq_f64(d23, d23));
  }
  double tail = 0.0;
  for (; j < d; ++j) {
    const double t = a[j] - b[j];
    tail += t * t;
  }
  const double s0 = vgetq_lane_f64(acc01, 0);
  const double s1 = vgetq_lane_f64(acc01, 1);
  const double s2 = vgetq_lane_f64(acc23, 0);
  const double s3 = vgetq_lane_f64(acc23, 1);
  return ((s0 + s1) + (s2 + s3)) + tail;
}

void add_into_neon(double* acc, const double* x, std::size_t d) {
  std::size_t j = 0;
  for (; j + 2 <= d; j += 2) {
    vst1q_f64(acc + j, vaddq_f64(vld1q_f64(acc + j), vld1q_f64(x + j)));
  }
  for (; j < d; ++j) acc[j] += x[j];
}

}  // namespace delkm::kernels::detail

#endif  // __aarch64__
