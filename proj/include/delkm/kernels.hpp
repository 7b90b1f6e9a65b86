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

namespace delkm::kernels {

// Arithmetic inner loops, with a scalar reference implementation and SIMD
// variants selected at runtime. Every variant of a reduction kernel follows
// the same accumulation order -- four stripes over element index mod 4,
// combined as ((s0 + s1) + (s2 + s3)) + tail -- so all backends return
// bit-identical results. The equivalence is asserted by tests; clustering
// output therefore does not depend on the host CPU's feature set.

enum class Backend {
  auto_detect,  // pick the widest supported variant
  scalar,
  avx2,
  neon,
};

/// Select the backend. `auto_detect` resolves immediately. Throws DataError
/// if the requested backend is not supported on this host. Not thread-safe;
/// configure before concurrent use.
void set_backend(Backend b);

/// The backend currently in effect (never `auto_detect`).
Backend active_backend();

const char* backend_name(Backend b);

/// True if this build/host can run the given backend.
bool backend_supported(Backend b);

/// Sum of squared coordinate differences between two d-vectors.
double squared_l2(const double* a, const double* b, std::size_t d);

/// Euclidean distance.
double l2(const double* a, const double* b, std::size_t d);

/// acc[j] += x[j] for j in [0, d). Element-wise, no reduction.
void add_into(double* acc, const double* x, std::size_t d);

/// Index of the centroid closest to x under squared Euclidean distance,
/// ties broken toward the lowest index. centroids is k rows of d values.
/// k must be >= 1. If sq_out is non-null it receives the winning distance.
std::size_t nearest(const double* x, const double* centroids, std::size_t k,
                    std::size_t d, double* sq_out = nullptr);

namespace detail {
// Per-backend entry points; exposed for the equivalence tests.
double squared_l2_scalar(const double* a, const double* b, std::size_t d);
void add_into_scalar(double* acc, const double* x, std::size_t d);
#if defined(__x86_64__) || defined(_M_X64)
double squared_l2_avx2(const double* a, const double* b, std::size_t d);
void add_into_avx2(double* acc, const double* x, std::size_t d);
#endif
#if defined(__aarch64__)
double squared_l2_neon(const double* a, const double* b, std::size_t d);
void add_into_neon(double* acc, const double* x, std::size_t d);
#endif
}  // namespace detail

}  // namespace delkm::kernels
