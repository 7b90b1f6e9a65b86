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

#include "delkm/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>

#include "delkm/errors.hpp"

namespace delkm {

DataMatrix::DataMatrix(std::vector<double> values, std::size_t dim)
    : values_(std::move(values)), dim_(dim) {
  if (dim_ == 0) throw DataError("DataMatrix: dimension must be >= 1");
  if (values_.size() % dim_ != 0)
    throw InvariantError("DataMatrix: value count not divisible by dimension");
  alive_.assign(values_.size() / dim_, 1);
  live_ = alive_.size();
}

DataMatrix::DataMatrix(std::vector<double> values, std::size_t dim,
                       std::vector<char> alive)
    : values_(std::move(values)), alive_(std::move(alive)), dim_(dim) {
  if (dim_ == 0) throw DataError("DataMatrix: dimension must be >= 1");
  if (values_.size() != alive_.size() * dim_)
    throw InvariantError("DataMatrix: mask size does not match values");
  live_ = 0;
  for (char a : alive_) live_ += (a != 0);
}

const double* DataMatrix::point(RowId id) const {
  if (!has_row(id)) throw DataError("unknown row id " + std::to_string(id));
  return values_.data() + id * dim_;
}

void DataMatrix::delete_row(RowId id) {
  if (!has_row(id)) throw DataError("unknown row id " + std::to_string(id));
  if (!alive_[id]) throw DataError("row " + std::to_string(id) + " already deleted");
  alive_[id] = 0;
  --live_;
}

std::vector<RowId> DataMatrix::live_ids() const {
  std::vector<RowId> ids;
  ids.reserve(live_);
  for (RowId id = 0; id < alive_.size(); ++id)
    if (alive_[id]) ids.push_back(id);
  return ids;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  cell = trim(cell);
  double value = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
    throw DataError("parse error at row " + std::to_string(row) + ", column " +
                    std::to_string(col) + ": '" + std::string(cell) + "'");
  if (!std::isfinite(value))
    throw DataError("non-finite value at row " + std::to_string(row) +
                    ", column " + std::to_string(col));
  return value;
}

}  // namespace

LabeledDataset load_csv(const std::string& path, bool has_header,
                        std::optional<std::size_t> label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t columns = 0;
  std::size_t row = 0;
  std::string line;
  bool skipped_header = !has_header;

  while (std::getline(in, line)) {
    std::string_view rest = line;
    if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
    if (trim(rest).empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::size_t col = 0;
    std::size_t cells = 0;
    for (;;) {
      const auto comma = rest.find(',');
      const std::string_view cell =
          comma == std::string_view::npos ? rest : rest.substr(0, comma);
      if (label_column && col == *label_column) {
        const double lv = parse_cell(cell, row, col);
        const double rounded = std::nearbyint(lv);
        if (std::fabs(lv - rounded) > 1e-9)
          throw DataError("label is not an integer at row " + std::to_string(row) +
                          ", column " + std::to_string(col));
        labels.push_back(static_cast<int>(rounded));
      } else {
        values.push_back(parse_cell(cell, row, col));
        ++cells;
      }
      ++col;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (label_column && *label_column >= col)
      throw DataError("label column " + std::to_string(*label_column) +
                      " out of range at row " + std::to_string(row));
    if (row == 0) {
      columns = cells;
      if (columns == 0) throw DataError("no feature columns in " + path);
    } else if (cells != columns) {
      throw DataError("ragged row " + std::to_string(row) + ": expected " +
                      std::to_string(columns) + " feature cells, got " +
                      std::to_string(cells));
    }
    ++row;
  }
  if (row == 0) throw DataError("no data rows in " + path);

  LabeledDataset out;
  out.data = DataMatrix(std::move(values), columns);
  out.labels = std::move(labels);
  return out;
}

std::pair<DataMatrix, ScaleParams> minmax_scale(const DataMatrix& input) {
  if (input.live_count() == 0) throw DataError("minmax_scale: empty dataset");
  const std::size_t d = input.dim();
  ScaleParams params;
  params.min.assign(d, std::numeric_limits<double>::infinity());
  params.max.assign(d, -std::numeric_limits<double>::infinity());
  input.for_each_live([&](RowId, const double* p) {
    for (std::size_t j = 0; j < d; ++j) {
      if (p[j] < params.min[j]) params.min[j] = p[j];
      if (p[j] > params.max[j]) params.max[j] = p[j];
    }
  });

  std::vector<double> scaled = input.values();
  for (std::size_t r = 0; r < input.total_rows(); ++r) {
    double* p = scaled.data() + r * d;
    for (std::size_t j = 0; j < d; ++j) {
      const double range = params.max[j] - params.min[j];
      p[j] = range > 0.0 ? (p[j] - params.min[j]) / range : 0.0;
    }
  }
  return {DataMatrix(std::move(scaled), d, input.alive_mask()), std::move(params)};
}

LabeledDataset gen_gaussian_mixture(std::size_t n_per_cluster, std::size_t dim,
                                    std::size_t k, double variance,
                                    std::uint64_t seed) {
  if (n_per_cluster == 0 || dim == 0 || k == 0)
    throw DataError("gen_gaussian_mixture: counts must be >= 1");
  if (variance < 0.0 || !std::isfinite(variance))
    throw DataError("gen_gaussian_mixture: variance must be finite and >= 0");

  RngStream rng(seed);
  std::vector<double> centers(k * dim);
  for (double& c : centers) c = rng.uniform01();

  const double sigma = std::sqrt(variance);
  std::vector<double> values;
  values.reserve(n_per_cluster * k * dim);
  std::vector<int> labels;
  labels.reserve(n_per_cluster * k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n_per_cluster; ++i) {
      for (std::size_t j = 0; j < dim; ++j)
        values.push_back(centers[c * dim + j] + sigma * rng.gaussian());
      labels.push_back(static_cast<int>(c));
    }
  }
  LabeledDataset out;
  out.data = DataMatrix(std::move(values), dim);
  out.labels = std::move(labels);
  return out;
}

DeletionStream gen_deletion_stream(const DataMatrix& data, std::size_t m,
                                   std::uint64_t seed) {
  if (m > data.live_count())
    throw DataError("deletion stream longer than live row count");
  RngStream rng(seed);
  std::vector<RowId> pool = data.live_ids();
  DeletionStream stream;
  stream.seed = seed;
  stream.ids.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t pick = rng.uniform_below(pool.size());
    stream.ids.push_back(pool[pick]);
    pool[pick] = pool.back();
    pool.pop_back();
  }
  return stream;
}

}  // namespace delkm
