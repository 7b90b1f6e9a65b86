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
#include <string>
#include <vector>

#include "delkm/dataset.hpp"
#include "delkm/dckmeans.hpp"
#include "delkm/kmeans.hpp"
#include "delkm/qkmeans.hpp"

namespace delkm {

/// Hash of the dataset's live content (dimension, live row ids, raw values).
/// Models carry it so a model file cannot silently be replayed against a
/// drifted dataset.
std::uint64_t dataset_fingerprint(const DataMatrix& data);

/// On-disk model envelope (versioned JSON). Besides the trained model it
/// records how the dataset was prepared (scaling) and which rows the model
/// has already deleted, so a fresh load of the source file can be brought
/// back in sync before the fingerprint is checked.
struct ModelFile {
  std::string kind;  // "baseline" | "qkmeans" | "dckmeans"
  LloydModel baseline;
  QkModel qk;
  DcModel dc;
  bool scaled = false;
  std::vector<RowId> deleted_rows;  // in deletion order
  std::uint64_t fingerprint = 0;
};

/// Serializes to JSON text. Doubles round-trip exactly.
std::string model_to_json(const ModelFile& model);
ModelFile model_from_json(const std::string& text);

/// Atomic save: writes a temp file in the target directory then renames.
void save_model_file(const ModelFile& model, const std::string& path);
ModelFile load_model_file(const std::string& path);

/// One centroid per line, comma-separated coordinates.
void write_centroids_csv(const CentroidSet& centroids, const std::string& path);

/// One row id per line.
void write_deletion_stream(const DeletionStream& stream, const std::string& path);
DeletionStream read_deletion_stream(const std::string& path);

/// Feature CSV, optional integer label as column 0.
void write_dataset_csv(const LabeledDataset& dataset, const std::string& path,
                       bool include_labels);

}  // namespace delkm
