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

#include "delkm/kmeans.hpp"

#include <algorithm>
#include <cstring>

#include "delkm/errors.hpp"
#include "delkm/kernels.hpp"
#include "delkm/parallel.hpp"

namespace delkm {

SeedSet kmeanspp_init(const DataMatrix& data, std::size_t k, RngStream& rng) {
  const std::size_t n = data.live_count();
  const std::size_t d = data.dim();
  if (k == 0) throw DataError("kmeanspp_init: k must be >= 1");
  if (k > n) throw DataError("kmeanspp_init: k exceeds live row count");

  const std::vector<RowId> live = data.live_ids();
  SeedSet seeds;
  seeds.points.dim = d;
  seeds.points.values.reserve(k * d);
  seeds.rows.reserve(k);
  std::vector<char> chosen(live.size(), 0);

  // First pick: uniform over live rows.
  {
    const std::size_t i = rng.uniform_below(live.size());
    chosen[i] = 1;
    seeds.rows.push_back(live[i]);
    const double* p = data.point(live[i]);
    seeds.points.values.insert(seeds.points.values.end(), p, p + d);
  }

  // weights[i] = squared distance to the nearest chosen centroid, kept as a
  // running minimum. Chosen rows (and exact duplicates of them) sit at 0.
  std::vector<double> weights(live.size());
  for (std::size_t i = 0; i < live.size(); ++i)
    weights[i] = kernels::squared_l2(data.point(live[i]), seeds.points.row(0), d);

  std::vector<double> cumulative(live.size());
  while (seeds.rows.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < live.size(); ++i) {
      total += weights[i];
      cumulative[i] = total;
    }
    std::size_t pick;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      pick = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), target) -
          cumulative.begin());
      if (pick >= live.size()) pick = live.size() - 1;
    } else {
      // All remaining mass is on duplicates of chosen points: uniform over
      // the rows not yet chosen.
      std::size_t unchosen = 0;
      for (char c : chosen) unchosen += (c == 0);
      std::size_t offset = rng.uniform_below(unchosen);
      pick = 0;
      for (std::size_t i = 0; i < live.size(); ++i) {
        if (chosen[i]) continue;
        if (offset == 0) {
          pick = i;
          break;
        }
        --offset;
      }
    }
    chosen[pick] = 1;
    seeds.rows.push_back(live[pick]);
    const double* p = data.point(live[pick]);
    seeds.points.values.insert(seeds.points.values.end(), p, p + d);
    for (std::size_t i = 0; i < live.size(); ++i) {
      const double sq = kernels::squared_l2(data.point(live[i]), p, d);
      if (sq < weights[i]) weights[i] = sq;
    }
  }
  return seeds;
}

Assignment assign(const DataMatrix& data, const CentroidSet& centroids) {
  if (centroids.dim != data.dim())
    throw DataError("assign: centroid dimension does not match dataset");
  const std::size_t k = centroids.size();
  if (k == 0) throw DataError("assign: empty centroid set");
  const std::size_t d = data.dim();
  const std::size_t rows = data.total_rows();

  Assignment a;
  a.cluster_of.assign(rows, Assignment::kUnassigned);
  a.sizes.assign(k, 0);

  // The loss is always accumulated over the same fixed block structure and
  // combined in block order, so the result is bit-identical for any worker
  // count (including the single-threaded path).
  const std::size_t blocks = std::min<std::size_t>(64, rows == 0 ? 1 : rows);
  std::vector<double> block_loss(blocks, 0.0);
  std::vector<std::size_t> block_sizes(blocks * k, 0);
  run_blocks(blocks, [&](std::size_t b) {
    const auto range = block_range(rows, blocks, b);
    double loss = 0.0;
    std::size_t* sizes = block_sizes.data() + b * k;
    for (RowId id = range.begin; id < range.end; ++id) {
      if (!data.is_live(id)) continue;
      double sq = 0.0;
      const std::size_t c =
          kernels::nearest(data.point(id), centroids.values.data(), k, d, &sq);
      a.cluster_of[id] = static_cast<std::uint32_t>(c);
      ++sizes[c];
      loss += sq;
    }
    block_loss[b] = loss;
  });
  for (std::size_t b = 0; b < blocks; ++b) {
    a.loss += block_loss[b];
    for (std::size_t c = 0; c < k; ++c) a.sizes[c] += block_sizes[b * k + c];
  }
  return a;
}

Means centroids_of(const DataMatrix& data, const Assignment& a, std::size_t k) {
  const std::size_t d = data.dim();
  if (a.cluster_of.size() != data.total_rows())
    throw DataError("centroids_of: assignment does not match dataset");
  Means m;
  m.centroids.dim = d;
  m.centroids.values.assign(k * d, 0.0);
  m.counts.assign(k, 0);
  data.for_each_live([&](RowId id, const double* p) {
    const std::uint32_t c = a.cluster_of[id];
    if (c >= k) throw InvariantError("centroids_of: cluster index out of range");
    kernels::add_into(m.centroids.row(c), p, d);
    ++m.counts[c];
  });
  for (std::size_t c = 0; c < k; ++c) {
    if (m.counts[c] == 0) continue;
    double* row = m.centroids.row(c);
    const double inv = 1.0 / static_cast<double>(m.counts[c]);
    for (std::size_t j = 0; j < d; ++j) row[j] *= inv;
  }
  return m;
}

double kmeans_loss(const DataMatrix& data, const CentroidSet& centroids) {
  if (centroids.dim != data.dim())
    throw DataError("kmeans_loss: centroid dimension does not match dataset");
  const std::size_t k = centroids.size();
  const std::size_t d = data.dim();
  double total = 0.0;
  data.for_each_live([&](RowId, const double* p) {
    double sq = 0.0;
    kernels::nearest(p, centroids.values.data(), k, d, &sq);
    total += sq;
  });
  return total;
}

LloydResult lloyd(const DataMatrix& data, std::size_t k, std::size_t max_iters,
                  RngStream& rng) {
  const SeedSet seeds = kmeanspp_init(data, k, rng);
  LloydResult r;
  r.centroids = seeds.points;
  r.assignment = assign(data, r.centroids);
  r.loss_history.push_back(r.assignment.loss);

  for (std::size_t t = 0; t < max_iters; ++t) {
    Means m = centroids_of(data, r.assignment, k);
    for (std::size_t c = 0; c < k; ++c) {
      if (m.counts[c] == 0)
        std::memcpy(m.centroids.row(c), r.centroids.row(c), data.dim() * sizeof(double));
    }
    Assignment next = assign(data, m.centroids);
    const bool unchanged = next.cluster_of == r.assignment.cluster_of;
    r.centroids = std::move(m.centroids);
    r.assignment = std::move(next);
    r.loss_history.push_back(r.assignment.loss);
    r.iterations = t + 1;
    if (unchanged) break;
  }
  return r;
}

LloydModel lloyd_train(const DataMatrix& data, std::size_t k,
                       std::size_t max_iters, RngStream& rng) {
  LloydResult r = lloyd(data, k, max_iters, rng);
  LloydModel m;
  m.centroids = std::move(r.centroids);
  m.k = k;
  m.max_iters = max_iters;
  m.loss = r.loss_history.back();
  m.training_seed = rng.seed();
  return m;
}

void lloyd_delete(LloydModel& model, DataMatrix& data, RowId row) {
  data.delete_row(row);
  RngStream fresh(mix_seed(model.training_seed, ++model.retrain_count));
  const std::uint64_t count = model.retrain_count;
  LloydModel next = lloyd_train(data, model.k, model.max_iters, fresh);
  next.retrain_count = count;
  next.training_seed = model.training_seed;
  model = std::move(next);
}

}  // namespace delkm
