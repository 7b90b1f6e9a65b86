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
#include <limits>
#include <vector>

#include "delkm/dataset.hpp"
#include "delkm/rng.hpp"

namespace delkm {

/// k centroids of dimension `dim`, stored row-major.
struct CentroidSet {
  std::vector<double> values;
  std::size_t dim = 0;

  CentroidSet() = default;
  CentroidSet(std::vector<double> v, std::size_t d) : values(std::move(v)), dim(d) {}

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  double* row(std::size_t i) { return values.data() + i * dim; }
  const double* row(std::size_t i) const { return values.data() + i * dim; }
};

/// Nearest-centroid partition of the live rows. cluster_of is indexed by row
/// id; dead rows hold kUnassigned. `loss` is the sum of squared distances of
/// each live row to its centroid, accumulated in ascending row-id order.
struct Assignment {
  static constexpr std::uint32_t kUnassigned =
      std::numeric_limits<std::uint32_t>::max();

  std::vector<std::uint32_t> cluster_of;
  std::vector<std::size_t> sizes;
  double loss = 0.0;
};

/// Seeding result: the chosen points and, importantly, which rows they were.
struct SeedSet {
  CentroidSet points;
  std::vector<RowId> rows;
};

/// D^2-weighted seeding: first pick uniform over live rows, each further pick
/// proportional to squared distance to the nearest centroid chosen so far
/// (already-chosen rows carry weight 0). If every remaining weight is 0 --
/// duplicate points -- the pick falls back to uniform over the unchosen live
/// rows. Throws DataError when k exceeds the live count.
SeedSet kmeanspp_init(const DataMatrix& data, std::size_t k, RngStream& rng);

/// Maps every live row to its nearest centroid (squared Euclidean distance,
/// ties to the lowest cluster index). Pure function of (data, centroids).
Assignment assign(const DataMatrix& data, const CentroidSet& centroids);

/// Cluster means. Empty clusters are reported with count 0 and a zero
/// centroid; the caller decides how to treat them.
struct Means {
  CentroidSet centroids;
  std::vector<std::size_t> counts;
};
Means centroids_of(const DataMatrix& data, const Assignment& a, std::size_t k);

/// Sum over live rows of the squared distance to the nearest centroid.
double kmeans_loss(const DataMatrix& data, const CentroidSet& centroids);

struct LloydResult {
  CentroidSet centroids;
  Assignment assignment;
  /// loss_history[t] is the loss of the centroids after t update rounds;
  /// entry 0 is the seeding loss. Non-increasing.
  std::vector<double> loss_history;
  std::size_t iterations = 0;
};

/// Canonical iterative refinement: D^2-weighted seeding, then at most
/// max_iters rounds of assign + recompute means (empty clusters keep their
/// previous centroid), stopping early once the assignment no longer changes.
LloydResult lloyd(const DataMatrix& data, std::size_t k, std::size_t max_iters,
                  RngStream& rng);

/// Trained baseline model: plain centroids plus the bookkeeping needed to
/// retrain reproducibly (deletion is satisfied by retraining from scratch).
struct LloydModel {
  CentroidSet centroids;
  std::size_t k = 0;
  std::size_t max_iters = 0;
  double loss = 0.0;
  std::uint64_t training_seed = 0;
  std::uint64_t retrain_count = 0;
};

LloydModel lloyd_train(const DataMatrix& data, std::size_t k,
                       std::size_t max_iters, RngStream& rng);

/// Deletes the row and retrains on the remainder with a stream derived from
/// the model's seed chain. Always a full retrain.
void lloyd_delete(LloydModel& model, DataMatrix& data, RowId row);

}  // namespace delkm
