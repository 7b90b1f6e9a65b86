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

#include <cstdint>
#include <optional>
#include <vector>

#include "delkm/dataset.hpp"
#include "delkm/kmeans.hpp"
#include "delkm/rng.hpp"

namespace delkm {

/// Mean silhouette over (possibly subsampled) live rows. For each point,
/// a = mean Euclidean distance to the other points of its cluster and
/// b = the smallest mean distance to any other non-empty cluster; the point
/// scores (b - a) / max(a, b). Points alone in their cluster score 0. When
/// live_count exceeds sample_cap, the score is computed over a uniform
/// subsample of sample_cap points (distances among the subsample only).
/// Requires at least two non-empty clusters among the scored points.
double silhouette(const DataMatrix& data, const Assignment& assignment,
                  std::size_t sample_cap, RngStream& rng);

/// Mutual information of the two labelings normalized by the arithmetic mean
/// of their entropies. Symmetric, invariant under relabelings, in [0, 1].
/// Degenerate cases are pinned: both labelings constant -> 1, exactly one
/// constant -> 0.
double nmi(const std::vector<int>& predicted, const std::vector<int>& truth);

/// method_loss / baseline_loss. Throws DataError unless baseline_loss > 0.
double loss_ratio(double method_loss, double baseline_loss);

/// Cluster-quality snapshot taken at benchmark checkpoints.
struct QualityReport {
  double loss = 0.0;
  /// Present when a baseline loss was supplied for comparison.
  std::optional<double> ratio;
  double silhouette = 0.0;
  /// Present when the dataset carries ground-truth labels.
  std::optional<double> nmi;
  std::uint64_t subsample_seed = 0;
};

}  // namespace delkm
