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
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delkm/rng.hpp"

namespace delkm {

/// Stable identifier of a data row. Ids are assigned once (file/generation
/// order) and never shift or get reused, no matter how many rows are deleted.
using RowId = std::size_t;

/// Dense n x d matrix of points with O(1) logical row deletion. Deleted rows
/// keep their storage (their values stay readable) but are excluded from all
/// live iteration, and their ids are never handed out again.
class DataMatrix {
 public:
  DataMatrix() = default;

  /// Takes row-major values; every row starts out live.
  DataMatrix(std::vector<double> values, std::size_t dim);

  /// Restores a matrix with an explicit live/dead mask (deserialization,
  /// scaling). alive.size() * dim must equal values.size().
  DataMatrix(std::vector<double> values, std::size_t dim, std::vector<char> alive);

  std::size_t dim() const { return dim_; }

  /// Number of ids ever created, live or not.
  std::size_t total_rows() const { return alive_.size(); }

  std::size_t live_count() const { return live_; }

  bool has_row(RowId id) const { return id < alive_.size(); }
  bool is_live(RowId id) const { return id < alive_.size() && alive_[id]; }

  /// Pointer to the row's d values. Valid for any existing id, live or dead.
  const double* point(RowId id) const;

  /// Marks the row deleted in O(1). Throws DataError if the id is unknown or
  /// already deleted.
  void delete_row(RowId id);

  /// Ids of live rows in ascending order.
  std::vector<RowId> live_ids() const;

  template <class F>
  void for_each_live(F&& f) const {
    for (RowId id = 0; id < alive_.size(); ++id)
      if (alive_[id]) f(id, values_.data() + id * dim_);
  }

  const std::vector<double>& values() const { return values_; }
  const std::vector<char>& alive_mask() const { return alive_; }

 private:
  std::vector<double> values_;
  std::vector<char> alive_;
  std::size_t dim_ = 0;
  std::size_t live_ = 0;
};

/// Per-dimension ranges used by minmax_scale, kept for reference.
struct ScaleParams {
  std::vector<double> min;
  std::vector<double> max;
};

/// A dataset plus ground-truth class labels, aligned by row id. `labels` is
/// empty when the source had none.
struct LabeledDataset {
  DataMatrix data;
  std::vector<int> labels;
};

/// An ordered sequence of rows to delete, plus the seed that produced it.
struct DeletionStream {
  std::vector<RowId> ids;
  std::uint64_t seed = 0;
};

/// Parses a comma-separated numeric file (UTF-8, '.' decimal separator,
/// optional single header row). If label_column is set, that column holds an
/// integer class label and the rest are features. Row ids are 0..n-1 in file
/// order. Throws DataError on ragged rows, non-numeric or non-finite cells,
/// reporting the 0-based data row and column.
LabeledDataset load_csv(const std::string& path, bool has_header,
                        std::optional<std::size_t> label_column);

/// Maps each dimension affinely so that over the live rows its minimum goes
/// to 0 and its maximum to 1. Constant dimensions map to 0. A one-time
/// operation: callers are expected to scale once at ingestion and keep the
/// scaled data through any later deletions.
std::pair<DataMatrix, ScaleParams> minmax_scale(const DataMatrix& input);

/// Synthetic mixture: k centers drawn uniformly from the unit hypercube, then
/// n_per_cluster points per center with isotropic Gaussian noise of the given
/// per-coordinate variance. Labels record the generating center. Rows are
/// laid out cluster-major. Bit-reproducible for a fixed seed.
LabeledDataset gen_gaussian_mixture(std::size_t n_per_cluster, std::size_t dim,
                                    std::size_t k, double variance,
                                    std::uint64_t seed);

/// m distinct rows; the j-th entry is uniform over the rows still live after
/// the first j-1 picks. Does not mutate the dataset.
DeletionStream gen_deletion_stream(const DataMatrix& data, std::size_t m,
                                   std::uint64_t seed);

}  // namespace delkm
