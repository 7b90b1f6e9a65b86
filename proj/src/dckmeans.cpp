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

#include "delkm/dckmeans.hpp"

#include <algorithm>
#include <cmath>

#include "delkm/errors.hpp"
#include "delkm/heuristics.hpp"

namespace delkm {

namespace {

void validate_params(const DcParams& p) {
  if (p.k == 0) throw DataError("dckmeans: k must be >= 1");
  if (p.iters == 0) throw DataError("dckmeans: iters must be >= 1");
  if (p.width == 0) throw DataError("dckmeans: width must be >= 1");
  if (p.height == 0) throw DataError("dckmeans: height must be >= 1");
}

std::size_t level_node_count(std::size_t width, std::size_t level) {
  double w = 1.0;
  for (std::size_t l = 0; l < level; ++l) w *= static_cast<double>(width);
  return nearest_pow2(w);
}

/// Solves one sub-problem. Fewer than k points: the points themselves are
/// the centroids.
CentroidSet solve_node(const std::vector<double>& points, std::size_t dim,
                       std::size_t k, std::size_t iters, std::uint64_t seed) {
  const std::size_t count = dim == 0 ? 0 : points.size() / dim;
  if (count < k) return CentroidSet(points, dim);
  DataMatrix local(points, dim);
  RngStream rng(seed);
  return lloyd(local, k, iters, rng).centroids;
}

std::vector<double> gather_leaf_points(const DataMatrix& data, const DcNode& leaf) {
  std::vector<double> pts;
  pts.reserve(leaf.rows.size() * data.dim());
  for (RowId row : leaf.rows) {
    const double* p = data.point(row);
    pts.insert(pts.end(), p, p + data.dim());
  }
  return pts;
}

std::vector<double> gather_child_centroids(const DcModel& model, const DcNode& node) {
  std::vector<double> pts;
  for (std::uint32_t child : node.children) {
    const CentroidSet& c = model.nodes[child].centroids;
    pts.insert(pts.end(), c.values.begin(), c.values.end());
  }
  return pts;
}

void resolve_node(DcModel& model, const DataMatrix& data, DcNode& node) {
  const std::vector<double> pts = node.children.empty()
                                      ? gather_leaf_points(data, node)
                                      : gather_child_centroids(model, node);
  node.centroids =
      solve_node(pts, data.dim(), model.params.k, model.params.iters, node.seed);
}

/// Builds the node skeleton: one level per depth, level l holding the power
/// of two nearest to width^l, children split evenly among parents.
DcModel build_tree(const DcParams& params) {
  DcModel model;
  model.params = params;
  model.width_requested = params.width;

  std::vector<std::size_t> level_counts(params.height + 1);
  for (std::size_t l = 0; l <= params.height; ++l)
    level_counts[l] = level_node_count(params.width, l);
  model.leaf_count = level_counts[params.height];
  model.params.width = level_node_count(params.width, 1);

  std::vector<std::size_t> level_offset(params.height + 1);
  std::size_t total = 0;
  for (std::size_t l = 0; l <= params.height; ++l) {
    level_offset[l] = total;
    total += level_counts[l];
  }
  model.nodes.resize(total);
  for (std::size_t l = 0; l <= params.height; ++l) {
    for (std::size_t i = 0; i < level_counts[l]; ++i) {
      DcNode& node = model.nodes[level_offset[l] + i];
      node.id = static_cast<std::uint32_t>(level_offset[l] + i);
      node.level = static_cast<std::uint32_t>(l);
      if (l == 0) {
        node.parent = node.id;
      } else {
        const std::size_t ratio = level_counts[l] / level_counts[l - 1];
        node.parent =
            static_cast<std::uint32_t>(level_offset[l - 1] + i / ratio);
        model.nodes[node.parent].children.push_back(node.id);
      }
    }
  }
  return model;
}

DcModel train_with(const DataMatrix& data, const DcParams& params,
                   std::uint64_t training_seed,
                   const std::vector<std::int64_t>* injected_scatter,
                   const std::vector<std::uint64_t>* injected_seeds) {
  validate_params(params);
  if (data.live_count() < params.k)
    throw DataError("dckmeans_train: k exceeds live row count");

  DcModel model = build_tree(params);
  model.training_seed = training_seed;
  model.n_live = data.live_count();
  model.dim = data.dim();

  const std::size_t first_leaf = model.first_leaf();
  if (injected_scatter) {
    if (injected_scatter->size() < data.total_rows())
      throw InvariantError("replay: scatter does not cover the dataset");
    model.leaf_of.assign(data.total_rows(), -1);
    for (RowId id = 0; id < data.total_rows(); ++id) {
      if (!data.is_live(id)) continue;
      const std::int64_t leaf = (*injected_scatter)[id];
      if (leaf < static_cast<std::int64_t>(first_leaf) ||
          leaf >= static_cast<std::int64_t>(model.nodes.size()))
        throw InvariantError("replay: scattered leaf id out of range");
      model.leaf_of[id] = leaf;
    }
  } else {
    RngStream scatter_rng(mix_seed(training_seed, 0x5C, 0));
    model.leaf_of = sample_leaf_scatter(data, model.leaf_count, scatter_rng);
    for (auto& leaf : model.leaf_of)
      if (leaf >= 0) leaf += static_cast<std::int64_t>(first_leaf);
  }
  for (RowId id = 0; id < model.leaf_of.size(); ++id)
    if (model.leaf_of[id] >= 0)
      model.nodes[model.leaf_of[id]].rows.push_back(id);

  // Solve bottom-up; nodes within a level are independent.
  for (std::size_t i = model.nodes.size(); i-- > 0;) {
    DcNode& node = model.nodes[i];
    node.epoch = 0;
    node.seed = injected_seeds ? (*injected_seeds)[node.id]
                               : mix_seed(training_seed, node.id, node.epoch);
    resolve_node(model, data, node);
  }
  return model;
}

}  // namespace

std::vector<std::int64_t> sample_leaf_scatter(const DataMatrix& data,
                                              std::size_t leaf_count,
                                              RngStream& rng) {
  if (leaf_count == 0) throw DataError("sample_leaf_scatter: no leaves");
  std::vector<std::int64_t> scatter(data.total_rows(), -1);
  for (RowId id = 0; id < data.total_rows(); ++id)
    if (data.is_live(id))
      scatter[id] = static_cast<std::int64_t>(rng.uniform_below(leaf_count));
  return scatter;
}

DcModel dckmeans_train(const DataMatrix& data, const DcParams& params,
                       RngStream& rng) {
  return train_with(data, params, rng.seed(), nullptr, nullptr);
}

DcModel dckmeans_replay(const DataMatrix& data, const DcParams& params,
                        const std::vector<std::int64_t>& leaf_of,
                        const std::vector<std::uint64_t>& node_seeds) {
  return train_with(data, params, 0, &leaf_of, &node_seeds);
}

DcDeleteResult dckmeans_delete(DcModel& model, DataMatrix& data, RowId row) {
  if (!data.is_live(row))
    throw DataError("dckmeans_delete: row " + std::to_string(row) + " is not live");
  if (model.n_live != data.live_count() || model.dim != data.dim())
    throw DataError("dckmeans_delete: model and dataset are out of sync");

  if (model.params.width_from_heuristic && model.n_live > 1) {
    const std::size_t fresh_width = heuristic_width(model.n_live - 1);
    if (fresh_width != model.params.width) {
      // The width rule stepped across a power of two; a patched tree would no
      // longer match what training on the smaller dataset produces.
      data.delete_row(row);
      DcParams next_params = model.params;
      next_params.width = fresh_width;
      const std::uint64_t parent = model.training_seed;
      const std::uint64_t count = model.retrain_count + 1;
      DcModel next = train_with(data, next_params, mix_seed(parent, count),
                                nullptr, nullptr);
      next.training_seed = parent;
      next.retrain_count = count;
      model = std::move(next);
      return DcDeleteResult{true};
    }
  }

  const std::int64_t leaf_id = model.leaf_of[row];
  if (leaf_id < 0) throw InvariantError("dckmeans_delete: row has no leaf");
  DcNode* node = &model.nodes[leaf_id];
  auto it = std::find(node->rows.begin(), node->rows.end(), row);
  if (it == node->rows.end())
    throw InvariantError("dckmeans_delete: row missing from its leaf");
  node->rows.erase(it);
  model.leaf_of[row] = -1;
  data.delete_row(row);
  model.n_live -= 1;

  // Re-solve the leaf-to-root path, nothing else.
  for (;;) {
    node->epoch += 1;
    node->seed = mix_seed(model.training_seed, node->id, node->epoch);
    resolve_node(model, data, *node);
    if (node->level == 0) break;
    node = &model.nodes[node->parent];
  }
  return DcDeleteResult{false};
}

}  // namespace delkm
