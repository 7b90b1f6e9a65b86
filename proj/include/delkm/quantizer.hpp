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

#include "delkm/rng.hpp"

namespace delkm {

/// Axis-aligned uniform lattice of spacing epsilon, shifted by a random
/// per-dimension phase theta in [-1/2, 1/2]. Vertices are epsilon*(theta + j)
/// for integer vectors j. Quantization maps a point to the nearest vertex.
///
/// Because the lattice is a product of one-dimensional grids, the joint
/// nearest vertex is found coordinate-by-coordinate in O(d): no search over
/// integer vectors is needed. Half-way ties round toward +infinity, a
/// probability-zero event under a random phase but pinned for replay.
struct LatticeQuantizer {
  double epsilon = 0.0;
  std::vector<double> theta;
};

/// d independent phases, uniform in [-1/2, 1/2].
std::vector<double> sample_phase(std::size_t d, RngStream& rng);

/// Writes the nearest lattice vertex of x into out (may alias x). Throws
/// DataError on non-finite input.
void quantize(const double* x, double* out, std::size_t d, double epsilon,
              const double* theta);

std::vector<double> quantize(const std::vector<double>& x,
                             const LatticeQuantizer& q);

}  // namespace delkm
