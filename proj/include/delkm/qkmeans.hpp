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

// Quantized k-means. Training follows the usual iterative refinement but
// snaps the centroids of every round to a random-phase lattice before
// re-partitioning, and memoizes the full per-round state. Snapped centroids
// are insensitive to the removal of one point from a large cluster, so most
// deletions can be satisfied by verifying -- against the memo -- that a
// from-scratch run on the smaller dataset would have produced the exact same
// quantized trajectory, and then patching the memo instead of retraining.

struct QkParams {
  std::size_t k = 0;
  std::size_t max_iters = 10;
  /// Balance ratio in (0,1): clusters holding fewer than gamma*n/k points are
  /// blended toward their previous centroid before quantization.
  double gamma = 0.2;
  /// Lattice spacing, > 0.
  double epsilon = 0.0;
};

/// A cluster that came up empty during an update round and was re-seeded with
/// a distance-weighted draw. The drawn row becomes load-bearing for deletion:
/// removing it later forces a retrain.
struct QkReinitEvent {
  std::uint32_t cluster = 0;
  RowId row = 0;
};

/// Memo of one update round, everything the deletion check needs to decide
/// whether this round would have come out identical without a given point.
struct QkIterationRecord {
  /// Cluster means before balance correction (re-seeded clusters hold the
  /// drawn point). k x d.
  std::vector<double> raw_means;
  /// After balance correction; this is what was quantized. k x d.
  std::vector<double> analog;
  /// Phase of this round's lattice. d.
  std::vector<double> phase;
  /// Quantized centroids. k x d.
  std::vector<double> quantized;
  /// Sizes of the partition the means were computed from.
  std::vector<std::size_t> source_sizes;
  /// Sizes of the partition induced by `quantized`.
  std::vector<std::size_t> new_sizes;
  /// Loss of `quantized` on the dataset as of this record's state.
  double loss = 0.0;
  /// Whether the round improved the loss and was kept.
  bool accepted = false;
  std::vector<QkReinitEvent> reinits;
};

struct QkModel {
  QkParams params;
  CentroidSet final_centroids;
  /// Rows chosen by the seeding, in pick order (cluster index order).
  std::vector<RowId> seed_rows;
  /// Their coordinates at training time. k x d.
  std::vector<double> seed_points;
  /// Loss of the seed centroids on the dataset as of the memo's state.
  double initial_loss = 0.0;
  std::vector<QkIterationRecord> iterations;
  std::size_t accepted_count = 0;
  /// Parent seed; retrains triggered by deletions derive fresh streams from
  /// it so whole benchmark runs stay reproducible.
  std::uint64_t training_seed = 0;
  std::uint64_t retrain_count = 0;
  /// Live rows the memo reflects. Kept in lockstep with the dataset.
  std::size_t n_live = 0;
  std::size_t dim = 0;
};

/// Balance correction. Clusters holding at least gamma*n/k points keep their
/// mean; a smaller cluster is replaced by the convex combination
///   (size * mean + (gamma*n/k - size) * previous) / (gamma*n/k),
/// so an empty cluster degenerates to its previous centroid (full momentum).
/// The threshold comparison is strict: a cluster holding exactly gamma*n/k
/// points is left alone.
CentroidSet gamma_correct(const CentroidSet& means, const CentroidSet& previous,
                          const std::vector<std::size_t>& sizes, double gamma,
                          std::size_t n_live, std::size_t k);

/// Trains on the live rows. Requires live_count >= k.
QkModel qkmeans_train(const DataMatrix& data, const QkParams& params,
                      RngStream& rng);

enum class QkDeletionOutcome {
  stable,                 // memo patched, centroids untouched
  retrain_seed_row,       // the row was a seeding pick
  retrain_reinit_row,     // the row re-seeded an empty cluster
  retrain_singleton,      // the row was alone in its cluster at some round
  retrain_quantization,   // some centroid would have snapped differently
  retrain_loss_gate,      // some round's keep/stop decision would have flipped
};

struct QkDeleteResult {
  bool retrained = false;
  QkDeletionOutcome outcome = QkDeletionOutcome::stable;
};

/// Deletes `row` from the dataset and updates the model so its distribution
/// matches training from scratch on the remaining rows. Cheap path: verify,
/// round by round, that the memoized quantized centroids, the re-partition
/// sizes and the keep/stop decisions would all have been identical without
/// the row, then fold the removal into the memo. Any divergence, or the row
/// being a recorded random pick, falls back to a full retrain on a stream
/// derived from the model's seed chain.
QkDeleteResult qkmeans_delete(QkModel& model, DataMatrix& data, RowId row);

/// The random choices a training run actually made. Feeding them back into
/// qkmeans_replay re-runs training deterministically; tests use this to
/// certify that a patched model is bit-identical to what retraining on the
/// smaller dataset would have produced given the same draws.
struct QkScript {
  std::vector<RowId> seed_rows;
  std::vector<std::vector<double>> phases;
  std::vector<std::vector<QkReinitEvent>> reinits;
};

QkScript qk_script_of(const QkModel& model);

/// Re-runs training with recorded choices instead of fresh draws. Throws
/// InvariantError if the run requests a choice the script does not contain
/// (that is, if the recorded trajectory diverges).
QkModel qkmeans_replay(const DataMatrix& data, const QkParams& params,
                       const QkScript& script);

}  // namespace delkm
