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

#include "delkm/qkmeans.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "delkm/errors.hpp"
#include "delkm/kernels.hpp"
#include "delkm/quantizer.hpp"

namespace delkm {

namespace {

void validate_params(const QkParams& p) {
  if (p.k == 0) throw DataError("qkmeans: k must be >= 1");
  if (p.max_iters == 0) throw DataError("qkmeans: max_iters must be >= 1");
  if (!(p.gamma > 0.0 && p.gamma < 1.0))
    throw DataError("qkmeans: gamma must be in (0, 1)");
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon))
    throw DataError("qkmeans: epsilon must be finite and > 0");
}

/// Balance blend of a small cluster toward the previous centroid. Shared by
/// training and the deletion check so both produce identical bits.
void balance_blend(double count, const double* raw, const double* prev,
                   double balance_min, double* out, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j)
    out[j] = (count * raw[j] + (balance_min - count) * prev[j]) / balance_min;
}

/// Supplies the random choices of a training run: fresh draws from a stream,
/// or recorded choices when replaying.
struct ChoiceSource {
  RngStream* rng = nullptr;
  const QkScript* script = nullptr;

  SeedSet pick_seeds(const DataMatrix& data, std::size_t k) {
    if (rng) return kmeanspp_init(data, k, *rng);
    if (script->seed_rows.size() != k)
      throw InvariantError("replay: seed count does not match k");
    SeedSet seeds;
    seeds.rows = script->seed_rows;
    seeds.points.dim = data.dim();
    for (RowId row : seeds.rows) {
      if (!data.is_live(row))
        throw InvariantError("replay: recorded seed row is not live");
      const double* p = data.point(row);
      seeds.points.values.insert(seeds.points.values.end(), p, p + data.dim());
    }
    return seeds;
  }

  std::vector<double> draw_phase(std::size_t d, std::size_t iter) {
    if (rng) return sample_phase(d, *rng);
    if (iter >= script->phases.size())
      throw InvariantError("replay diverged: no recorded phase for this round");
    if (script->phases[iter].size() != d)
      throw InvariantError("replay: recorded phase has wrong dimension");
    return script->phases[iter];
  }

  RowId pick_reseed(const DataMatrix& data, std::uint32_t cluster,
                    const std::vector<RowId>& live, std::vector<double>& weights,
                    const std::vector<char>& used, std::size_t iter,
                    std::size_t event) {
    if (rng) {
      double total = 0.0;
      for (double w : weights) total += w;
      if (total > 0.0) {
        double target = rng->uniform01() * total;
        for (std::size_t i = 0; i < live.size(); ++i) {
          target -= weights[i];
          if (target < 0.0) return live[i];
        }
        return live.back();
      }
      // Degenerate data: every point coincides with an existing centroid.
      std::size_t unchosen = 0;
      for (std::size_t i = 0; i < live.size(); ++i) unchosen += (used[i] == 0);
      std::size_t offset = rng->uniform_below(unchosen);
      for (std::size_t i = 0; i < live.size(); ++i) {
        if (used[i]) continue;
        if (offset == 0) return live[i];
        --offset;
      }
      throw InvariantError("reseed: no candidate row");
    }
    if (iter >= script->reinits.size() || event >= script->reinits[iter].size())
      throw InvariantError("replay diverged: no recorded reseed for this event");
    const QkReinitEvent& ev = script->reinits[iter][event];
    if (ev.cluster != cluster)
      throw InvariantError("replay diverged: reseed cluster mismatch");
    if (!data.is_live(ev.row))
      throw InvariantError("replay: recorded reseed row is not live");
    return ev.row;
  }
};

QkModel train_core(const DataMatrix& data, const QkParams& p, ChoiceSource& src,
                   std::uint64_t training_seed) {
  validate_params(p);
  const std::size_t n = data.live_count();
  const std::size_t d = data.dim();
  const std::size_t k = p.k;
  if (n < k) throw DataError("qkmeans_train: k exceeds live row count");

  const SeedSet seeds = src.pick_seeds(data, k);

  QkModel model;
  model.params = p;
  model.seed_rows = seeds.rows;
  model.seed_points = seeds.points.values;
  model.training_seed = training_seed;
  model.n_live = n;
  model.dim = d;

  Assignment current = assign(data, seeds.points);
  double current_loss = current.loss;
  model.initial_loss = current_loss;

  const double balance_min =
      p.gamma * static_cast<double>(n) / static_cast<double>(k);
  CentroidSet previous = seeds.points;

  for (std::size_t t = 0; t < p.max_iters; ++t) {
    Means means = centroids_of(data, current, k);

    QkIterationRecord rec;
    std::vector<char> reseeded(k, 0);
    {
      // Empty clusters get re-seeded with a distance-weighted draw; the drawn
      // row is recorded because its deletion invalidates the memo.
      std::vector<RowId> live;
      std::vector<double> weights;
      std::vector<char> used;
      std::size_t event = 0;
      for (std::uint32_t c = 0; c < k; ++c) {
        if (means.counts[c] != 0) continue;
        if (live.empty()) {
          live = data.live_ids();
          used.assign(live.size(), 0);
          weights.resize(live.size());
          for (std::size_t i = 0; i < live.size(); ++i)
            kernels::nearest(data.point(live[i]), previous.values.data(), k, d,
                             &weights[i]);
        }
        const RowId row =
            src.pick_reseed(data, c, live, weights, used, t, event++);
        const double* pt = data.point(row);
        std::memcpy(means.centroids.row(c), pt, d * sizeof(double));
        rec.reinits.push_back(QkReinitEvent{c, row});
        reseeded[c] = 1;
        for (std::size_t i = 0; i < live.size(); ++i) {
          if (live[i] == row) used[i] = 1;
          const double sq = kernels::squared_l2(data.point(live[i]), pt, d);
          if (sq < weights[i]) weights[i] = sq;
        }
      }
    }

    rec.raw_means = means.centroids.values;
    rec.source_sizes = means.counts;

    rec.analog = rec.raw_means;
    for (std::size_t c = 0; c < k; ++c) {
      if (reseeded[c]) continue;
      const double count = static_cast<double>(means.counts[c]);
      if (count < balance_min)
        balance_blend(count, rec.raw_means.data() + c * d, previous.row(c),
                      balance_min, rec.analog.data() + c * d, d);
    }

    rec.phase = src.draw_phase(d, t);
    rec.quantized.resize(k * d);
    for (std::size_t c = 0; c < k; ++c)
      quantize(rec.analog.data() + c * d, rec.quantized.data() + c * d, d,
               p.epsilon, rec.phase.data());

    CentroidSet snapped(rec.quantized, d);
    Assignment next = assign(data, snapped);
    rec.new_sizes = next.sizes;
    rec.loss = next.loss;
    rec.accepted = next.loss < current_loss;
    const bool accepted = rec.accepted;
    model.iterations.push_back(std::move(rec));

    if (!accepted) break;
    current = std::move(next);
    current_loss = model.iterations.back().loss;
    previous = std::move(snapped);
    ++model.accepted_count;
  }

  if (model.accepted_count > 0)
    model.final_centroids =
        CentroidSet(model.iterations[model.accepted_count - 1].quantized, d);
  else
    model.final_centroids = seeds.points;
  return model;
}

}  // namespace

CentroidSet gamma_correct(const CentroidSet& means, const CentroidSet& previous,
                          const std::vector<std::size_t>& sizes, double gamma,
                          std::size_t n_live, std::size_t k) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw DataError("gamma_correct: gamma must be in (0, 1)");
  if (means.size() != k || previous.size() != k || sizes.size() != k)
    throw DataError("gamma_correct: inputs do not agree on k");
  const std::size_t d = means.dim;
  const double balance_min =
      gamma * static_cast<double>(n_live) / static_cast<double>(k);
  CentroidSet out = means;
  for (std::size_t c = 0; c < k; ++c) {
    const double count = static_cast<double>(sizes[c]);
    if (count < balance_min)
      balance_blend(count, means.row(c), previous.row(c), balance_min,
                    out.row(c), d);
  }
  return out;
}

QkModel qkmeans_train(const DataMatrix& data, const QkParams& params,
                      RngStream& rng) {
  ChoiceSource src;
  src.rng = &rng;
  return train_core(data, params, src, rng.seed());
}

QkScript qk_script_of(const QkModel& model) {
  QkScript script;
  script.seed_rows = model.seed_rows;
  for (const QkIterationRecord& rec : model.iterations) {
    script.phases.push_back(rec.phase);
    script.reinits.push_back(rec.reinits);
  }
  return script;
}

QkModel qkmeans_replay(const DataMatrix& data, const QkParams& params,
                       const QkScript& script) {
  ChoiceSource src;
  src.script = &script;
  return train_core(data, params, src, 0);
}

QkDeleteResult qkmeans_delete(QkModel& model, DataMatrix& data, RowId row) {
  if (!data.is_live(row))
    throw DataError("qkmeans_delete: row " + std::to_string(row) + " is not live");
  if (model.n_live != data.live_count() || model.dim != data.dim())
    throw DataError("qkmeans_delete: model and dataset are out of sync");

  const std::size_t k = model.params.k;
  const std::size_t d = model.dim;
  const std::size_t n = model.n_live;
  const double* point = data.point(row);

  auto full_retrain = [&](QkDeletionOutcome outcome) {
    data.delete_row(row);
    const std::uint64_t parent = model.training_seed;
    const std::uint64_t count = model.retrain_count + 1;
    RngStream fresh(mix_seed(parent, count));
    QkModel next = qkmeans_train(data, model.params, fresh);
    next.training_seed = parent;
    next.retrain_count = count;
    model = std::move(next);
    return QkDeleteResult{true, outcome};
  };

  for (RowId seed : model.seed_rows)
    if (seed == row) return full_retrain(QkDeletionOutcome::retrain_seed_row);
  for (const QkIterationRecord& rec : model.iterations)
    for (const QkReinitEvent& ev : rec.reinits)
      if (ev.row == row) return full_retrain(QkDeletionOutcome::retrain_reinit_row);

  const double balance_new =
      model.params.gamma * static_cast<double>(n - 1) / static_cast<double>(k);

  // Walk the memo as a from-scratch run on the smaller dataset would, and
  // bail to a retrain at the first divergence. `cluster_prev` tracks the
  // deleted point's cluster in the partition each round's means came from;
  // the *_new values are what the smaller run would have seen.
  double seed_sq = 0.0;
  std::size_t cluster_prev =
      kernels::nearest(point, model.seed_points.data(), k, d, &seed_sq);
  const double* previous = model.seed_points.data();
  double loss_prev_old = model.initial_loss;
  double loss_prev_new = model.initial_loss - seed_sq;

  std::vector<double> analog_new(k * d);
  std::vector<double> quant_new(k * d);
  std::vector<double> raw_down(d);

  for (QkIterationRecord& rec : model.iterations) {
    const std::size_t source = rec.source_sizes[cluster_prev];
    if (source == 0)
      throw InvariantError("qkmeans_delete: point attributed to an empty cluster");
    if (source == 1) return full_retrain(QkDeletionOutcome::retrain_singleton);

    // Exact mean downdate of the deleted point's cluster.
    {
      const double s = static_cast<double>(source);
      const double* raw = rec.raw_means.data() + cluster_prev * d;
      for (std::size_t j = 0; j < d; ++j)
        raw_down[j] = (s * raw[j] - point[j]) / (s - 1.0);
    }

    std::vector<char> reseeded(k, 0);
    for (const QkReinitEvent& ev : rec.reinits) reseeded[ev.cluster] = 1;

    // Rebuild every cluster's post-correction centroid under the decremented
    // live count: the balance threshold and blend weights depend on n, so
    // clusters other than the deleted point's can shift too.
    for (std::size_t c = 0; c < k; ++c) {
      const double* raw =
          (c == cluster_prev) ? raw_down.data() : rec.raw_means.data() + c * d;
      double* out = analog_new.data() + c * d;
      if (reseeded[c]) {
        std::memcpy(out, raw, d * sizeof(double));
        continue;
      }
      const std::size_t size_after = rec.source_sizes[c] - (c == cluster_prev ? 1 : 0);
      const double count = static_cast<double>(size_after);
      if (count < balance_new)
        balance_blend(count, raw, previous + c * d, balance_new, out, d);
      else
        std::memcpy(out, raw, d * sizeof(double));
    }

    for (std::size_t c = 0; c < k; ++c)
      quantize(analog_new.data() + c * d, quant_new.data() + c * d, d,
               model.params.epsilon, rec.phase.data());
    for (std::size_t j = 0; j < k * d; ++j)
      if (quant_new[j] != rec.quantized[j])
        return full_retrain(QkDeletionOutcome::retrain_quantization);

    // The keep/stop decision compares losses on the dataset, which include
    // the deleted point's term; strip it from both sides and re-decide.
    double point_sq = 0.0;
    const std::size_t cluster_next =
        kernels::nearest(point, rec.quantized.data(), k, d, &point_sq);
    const double loss_cur_old = rec.loss;
    const double loss_cur_new = rec.loss - point_sq;
    const bool accept_old = loss_cur_old < loss_prev_old;
    if (accept_old != rec.accepted)
      throw InvariantError("qkmeans_delete: memoized gate decision inconsistent");
    const bool accept_new = loss_cur_new < loss_prev_new;
    if (accept_new != accept_old)
      return full_retrain(QkDeletionOutcome::retrain_loss_gate);

    // This round is certified identical; fold the removal into the memo.
    std::memcpy(rec.raw_means.data() + cluster_prev * d, raw_down.data(),
                d * sizeof(double));
    rec.analog = analog_new;
    rec.source_sizes[cluster_prev] -= 1;
    rec.new_sizes[cluster_next] -= 1;
    rec.loss = loss_cur_new;

    if (accept_old) {
      loss_prev_old = loss_cur_old;
      loss_prev_new = loss_cur_new;
      previous = rec.quantized.data();
      cluster_prev = cluster_next;
    }
  }

  model.initial_loss -= seed_sq;
  model.n_live -= 1;
  data.delete_row(row);
  return QkDeleteResult{false, QkDeletionOutcome::stable};
}

}  // namespace delkm
