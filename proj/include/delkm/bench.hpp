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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "delkm/dataset.hpp"
#include "delkm/kmeans.hpp"
#include "delkm/metrics.hpp"
#include "delkm/stats.hpp"

namespace delkm {

// Online deletion benchmark: train once, serve a pre-generated stream of
// uniform random deletion requests, and amortize (training time + total
// deletion time) over the number of requests. Only algorithm work is timed;
// stream generation, quality evaluation and bookkeeping run off the clock.

enum class BenchAlgo { baseline, qkmeans, dckmeans };

const char* algo_name(BenchAlgo algo);

struct BenchConfig {
  BenchAlgo algo = BenchAlgo::baseline;
  std::size_t m = 0;  // deletion requests per replicate
  std::size_t k = 0;
  std::size_t iters = 10;
  double gamma = 0.2;
  /// Explicit values; callers resolve heuristics before building the config.
  double epsilon = 0.0;       // qkmeans
  std::size_t width = 1;      // dckmeans
  std::size_t height = 1;     // dckmeans
  bool width_from_heuristic = false;
  std::uint64_t train_seed = 1;
  std::uint64_t stream_seed = 2;
  std::uint64_t metrics_seed = 3;
  /// Quality checkpoints, sorted request indices within [1, m].
  std::vector<std::size_t> checkpoints;
  std::size_t replicates = 5;
  /// Baseline loss for the ratio column of quality reports, when known.
  std::optional<double> baseline_loss;
  std::size_t silhouette_cap = 10000;
  /// Worker threads granted to internally parallel loops. 1 keeps the
  /// headline numbers single-core; anything else is labeled in the report.
  unsigned threads = 1;
};

struct BenchRequest {
  double seconds = 0.0;
  bool retrained = false;
};

struct BenchReplicate {
  double train_seconds = 0.0;
  double initial_loss = 0.0;
  std::vector<BenchRequest> requests;
  std::vector<std::size_t> retrain_events;  // 1-based request indices
  std::vector<std::pair<std::size_t, QualityReport>> checkpoints;
  double amortized_total = 0.0;  // (train + sum of requests) / m
};

struct BenchReport {
  std::string algorithm;
  std::size_t n = 0, d = 0, k = 0, m = 0, iters = 0;
  double gamma = 0.0;
  std::optional<double> epsilon;
  std::optional<std::size_t> width;
  std::optional<std::size_t> height;
  bool width_from_heuristic = false;
  std::uint64_t train_seed = 0, stream_seed = 0, metrics_seed = 0;
  unsigned threads = 1;
  std::string kernel_backend;
  std::vector<BenchReplicate> replicates;
  double train_mean = 0.0;
  double amortized_mean = 0.0;
  double amortized_std = 0.0;
  std::size_t retrain_total = 0;
};

/// One deletion-capable algorithm behind a uniform surface, so the harness
/// can time train/delete without knowing which method runs.
class DeletionAlgorithm {
 public:
  virtual ~DeletionAlgorithm() = default;
  virtual void train(DataMatrix& data, std::uint64_t seed) = 0;
  /// Deletes the row from the dataset and updates the model. Returns true
  /// when the request was satisfied by a full retrain.
  virtual bool delete_row(DataMatrix& data, RowId row) = 0;
  virtual const CentroidSet& centroids() const = 0;
};

std::unique_ptr<DeletionAlgorithm> make_algorithm(const BenchConfig& cfg);

BenchReport run_benchmark(const LabeledDataset& dataset, const BenchConfig& cfg);

/// Same harness with a caller-supplied algorithm factory (one instance per
/// replicate). Used to calibrate harness overhead with a do-nothing adapter.
BenchReport run_benchmark_with(
    const LabeledDataset& dataset, const BenchConfig& cfg,
    const std::function<std::unique_ptr<DeletionAlgorithm>()>& factory);

/// Statistical check that deleting `row` from a trained model matches
/// training without it. Runs `trials` independent train-then-delete pipelines
/// and `trials` independent train-on-the-smaller-dataset pipelines, then
/// compares the two final-loss samples and the two centroid-fingerprint
/// samples (weighted sums of sorted coordinates) by the KS test. This can
/// falsify distributional equality, never certify it.
struct EqualityVerdict {
  KsResult loss_ks;
  KsResult fingerprint_ks;
  bool pass = false;
  std::size_t trials = 0;
};

/// `sabotage` disables the model update inside the deletion operation (the
/// row disappears from the dataset but the model keeps its stale state); the
/// harness self-check expects the verdict to flip to fail on such a mutant.
EqualityVerdict deletion_equality_test(const BenchConfig& cfg,
                                       const LabeledDataset& tiny, RowId row,
                                       std::size_t trials, double significance,
                                       std::uint64_t seed, bool sabotage = false);

/// Writes the report. Formats: "json" (full, versioned schema) and "csv"
/// (plot-ready: one row per request of the first replicate).
void emit_report(const BenchReport& report, const std::string& format,
                 const std::string& path);

}  // namespace delkm
