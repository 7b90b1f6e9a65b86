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
#include <vector>

#include "delkm/dataset.hpp"
#include "delkm/kmeans.hpp"
#include "delkm/rng.hpp"

namespace delkm {

// Divide-and-conquer k-means. Rows are scattered uniformly over the leaves of
// a shallow tree; each leaf is solved as an independent k-means instance and
// each internal node re-clusters its children's centroids, up to the root,
// whose centroids are the model. A deletion only invalidates the solves on
// the path from one leaf to the root; every other node is untouched.

struct DcParams {
  std::size_t k = 0;
  /// Update rounds per sub-problem solve.
  std::size_t iters = 10;
  /// Fan-out per level. The leaf count width^height is rounded to the nearest
  /// power of two (ties upward) so that it cannot silently drift as rows are
  /// deleted; the effective rounded value is recorded in the model.
  std::size_t width = 1;
  std::size_t height = 1;
  /// Set when width came from heuristic_width(n). Deletions then re-evaluate
  /// the heuristic for the shrunken dataset; on the rare step change the
  /// whole model is retrained with the new width.
  bool width_from_heuristic = false;
};

struct DcNode {
  std::uint32_t id = 0;
  std::uint32_t level = 0;
  std::uint32_t parent = 0;  // root points at itself
  std::vector<std::uint32_t> children;
  /// Leaves only: the live rows scattered here.
  std::vector<RowId> rows;
  /// Internal nodes consume their children's current centroids (children in
  /// ascending id order, each child's centroids in cluster order), so their
  /// input dataset is always derived, never stored.
  CentroidSet centroids;
  /// Bumped on every re-solve; the seed is mix(training_seed, id, epoch).
  std::uint64_t epoch = 0;
  std::uint64_t seed = 0;
};

struct DcModel {
  DcParams params;          // width holds the effective (rounded) value
  std::size_t width_requested = 0;
  std::size_t leaf_count = 0;
  /// Nodes in level order; node 0 is the root, leaves are the trailing
  /// leaf_count entries.
  std::vector<DcNode> nodes;
  /// Leaf node id per row id; -1 for rows never seen or deleted.
  std::vector<std::int64_t> leaf_of;
  std::uint64_t training_seed = 0;
  std::uint64_t retrain_count = 0;
  std::size_t n_live = 0;
  std::size_t dim = 0;

  const CentroidSet& output() const { return nodes.front().centroids; }
  std::size_t first_leaf() const { return nodes.size() - leaf_count; }
};

/// Scatters each live row to one of leaf_count leaves, independently and
/// uniformly, in ascending row-id order. Returned vector is indexed by row id
/// with -1 for dead rows. Exposed for the load-balance tests.
std::vector<std::int64_t> sample_leaf_scatter(const DataMatrix& data,
                                              std::size_t leaf_count,
                                              RngStream& rng);

/// Trains on the live rows. Sub-problems holding fewer than k points return
/// their points verbatim as centroids (an empty leaf contributes none).
DcModel dckmeans_train(const DataMatrix& data, const DcParams& params,
                       RngStream& rng);

struct DcDeleteResult {
  /// True when the deletion had to rebuild the whole model (heuristic width
  /// step change); path re-solves alone do not count.
  bool full_retrain = false;
};

/// Deletes the row from its leaf and re-solves exactly the nodes on the
/// leaf-to-root path, each with a fresh epoch seed. Everything else is
/// bit-untouched.
DcDeleteResult dckmeans_delete(DcModel& model, DataMatrix& data, RowId row);

/// From-scratch training with an injected row scatter and per-node seeds
/// (the replay oracle): must reproduce a post-deletion model bit for bit.
DcModel dckmeans_replay(const DataMatrix& data, const DcParams& params,
                        const std::vector<std::int64_t>& leaf_of,
                        const std::vector<std::uint64_t>& node_seeds);

}  // namespace delkm
