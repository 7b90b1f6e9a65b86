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

#include "delkm/kernels.hpp"

#include <cmath>
#include <limits>

#include "delkm/errors.hpp"

namespace delkm::kernels {

namespace detail {

double squared_l2_scalar(const double* a, const double* b, std::size_t d) {
  // Reference accumulation order: four stripes, then tail. SIMD variants
  // replicate this order exactly.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= d; j += 4) {
    const double d0 = a[j + 0] - b[j + 0];
    const double d1 = a[j + 1] - b[j + 1];
    const double d2 = a[j + 2] - b[j + 2];
    const double d3 = a[j + 3] - b[j + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  double tail = 0.0;
  for (; j < d; ++j) {
    const double t = a[j] - b[j];
    tail += t * t;
  }
  return ((s0 + s1) + (s2 + s3)) + tail;
}

void add_into_scalar(double* acc, const double* x, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j) acc[j] += x[j];
}

}  // namespace detail

namespace {

struct Ops {
  double (*squared_l2)(const double*, const double*, std::size_t);
  void (*add_into)(double*, const double*, std::size_t);
};

constexpr Ops kScalarOps{&detail::squared_l2_scalar, &detail::add_into_scalar};

Ops ops_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return kScalarOps;
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2:
      return Ops{&detail::squared_l2_avx2, &detail::add_into_avx2};
#endif
#if defined(__aarch64__)
    case Backend::neon:
      return Ops{&detail::squared_l2_neon, &detail::add_into_neon};
#endif
    default:
      return kScalarOps;
  }
}

Backend detect_backend() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#elif defined(__aarch64__)
  return Backend::neon;
#endif
  return Backend::scalar;
}

Backend g_backend = detect_backend();
Ops g_ops = ops_for(g_backend);

}  // namespace

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::auto_detect:
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Backend::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

void set_backend(Backend b) {
  if (b == Backend::auto_detect) b = detect_backend();
  if (!backend_supported(b))
    throw DataError(std::string("kernel backend not supported on this host: ") +
                    backend_name(b));
  g_backend = b;
  g_ops = ops_for(b);
}

Backend active_backend() { return g_backend; }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::auto_detect:
      return "auto";
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "?";
}

double squared_l2(const double* a, const double* b, std::size_t d) {
  return g_ops.squared_l2(a, b, d);
}

double l2(const double* a, const double* b, std::size_t d) {
  return std::sqrt(g_ops.squared_l2(a, b, d));
}

void add_into(double* acc, const double* x, std::size_t d) {
  g_ops.add_into(acc, x, d);
}

std::size_t nearest(const double* x, const double* centroids, std::size_t k,
                    std::size_t d, double* sq_out) {
  if (k == 0) throw InvariantError("nearest: no centroids");
  std::size_t best = 0;
  double best_sq = g_ops.squared_l2(x, centroids, d);
  for (std::size_t c = 1; c < k; ++c) {
    const double sq = g_ops.squared_l2(x, centroids + c * d, d);
    if (sq < best_sq) {
      best_sq = sq;
      best = c;
    }
  }
  if (sq_out) *sq_out = best_sq;
  return best;
}

}  // namespace delkm::kernels
