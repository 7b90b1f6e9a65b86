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

#include "delkm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "delkm/dckmeans.hpp"
#include "delkm/errors.hpp"
#include "delkm/kernels.hpp"
#include "delkm/parallel.hpp"
#include "delkm/qkmeans.hpp"

namespace delkm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class BaselineAdapter : public DeletionAlgorithm {
 public:
  BaselineAdapter(std::size_t k, std::size_t iters, bool sabotage)
      : k_(k), iters_(iters), sabotage_(sabotage) {}

  void train(DataMatrix& data, std::uint64_t seed) override {
    RngStream rng(seed);
    model_ = lloyd_train(data, k_, iters_, rng);
  }

  bool delete_row(DataMatrix& data, RowId row) override {
    if (sabotage_) {
      data.delete_row(row);
      return false;
    }
    lloyd_delete(model_, data, row);
    return true;
  }

  const CentroidSet& centroids() const override { return model_.centroids; }

 private:
  std::size_t k_, iters_;
  bool sabotage_;
  LloydModel model_;
};

class QkAdapter : public DeletionAlgorithm {
 public:
  QkAdapter(const QkParams& params, bool sabotage)
      : params_(params), sabotage_(sabotage) {}

  void train(DataMatrix& data, std::uint64_t seed) override {
    RngStream rng(seed);
    model_ = qkmeans_train(data, params_, rng);
  }

  bool delete_row(DataMatrix& data, RowId row) override {
    if (sabotage_) {
      data.delete_row(row);
      return false;
    }
    return qkmeans_delete(model_, data, row).retrained;
  }

  const CentroidSet& centroids() const override { return model_.final_centroids; }

 private:
  QkParams params_;
  bool sabotage_;
  QkModel model_;
};

class DcAdapter : public DeletionAlgorithm {
 public:
  DcAdapter(const DcParams& params, bool sabotage)
      : params_(params), sabotage_(sabotage) {}

  void train(DataMatrix& data, std::uint64_t seed) override {
    RngStream rng(seed);
    model_ = dckmeans_train(data, params_, rng);
  }

  bool delete_row(DataMatrix& data, RowId row) override {
    if (sabotage_) {
      data.delete_row(row);
      return false;
    }
    return dckmeans_delete(model_, data, row).full_retrain;
  }

  const CentroidSet& centroids() const override { return model_.output(); }

 private:
  DcParams params_;
  bool sabotage_;
  DcModel model_;
};

std::unique_ptr<DeletionAlgorithm> make_algorithm_impl(const BenchConfig& cfg,
                                                       bool sabotage) {
  switch (cfg.algo) {
    case BenchAlgo::baseline:
      return std::make_unique<BaselineAdapter>(cfg.k, cfg.iters, sabotage);
    case BenchAlgo::qkmeans: {
      QkParams p;
      p.k = cfg.k;
      p.max_iters = cfg.iters;
      p.gamma = cfg.gamma;
      p.epsilon = cfg.epsilon;
      return std::make_unique<QkAdapter>(p, sabotage);
    }
    case BenchAlgo::dckmeans: {
      DcParams p;
      p.k = cfg.k;
      p.iters = cfg.iters;
      p.width = cfg.width;
      p.height = cfg.height;
      p.width_from_heuristic = cfg.width_from_heuristic;
      return std::make_unique<DcAdapter>(p, sabotage);
    }
  }
  throw InvariantError("make_algorithm: unknown algorithm");
}

void validate_config(const LabeledDataset& dataset, const BenchConfig& cfg) {
  if (cfg.m == 0) throw DataError("bench: m must be >= 1");
  if (cfg.m > dataset.data.live_count())
    throw DataError("bench: m exceeds live row count");
  if (cfg.k == 0) throw DataError("bench: k must be >= 1");
  if (cfg.replicates == 0) throw DataError("bench: replicates must be >= 1");
  if (!std::is_sorted(cfg.checkpoints.begin(), cfg.checkpoints.end()))
    throw DataError("bench: checkpoints must be sorted");
  if (std::adjacent_find(cfg.checkpoints.begin(), cfg.checkpoints.end()) !=
      cfg.checkpoints.end())
    throw DataError("bench: duplicate checkpoint");
  for (std::size_t c : cfg.checkpoints)
    if (c < 1 || c > cfg.m)
      throw DataError("bench: checkpoint " + std::to_string(c) +
                      " outside [1, m]");
}

struct ThreadGuard {
  unsigned saved = max_threads();
  ~ThreadGuard() { set_max_threads(saved); }
};

/// Order-free scalar summary of a centroid multiset: coordinates sorted
/// ascending, then dotted with weights 1..kd. Two equal multisets always map
/// to the same value; a systematic shift moves the statistic.
double centroid_fingerprint(const CentroidSet& c) {
  std::vector<double> coords = c.values;
  std::sort(coords.begin(), coords.end());
  double f = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i)
    f += static_cast<double>(i + 1) * coords[i];
  return f;
}

}  // namespace

const char* algo_name(BenchAlgo algo) {
  switch (algo) {
    case BenchAlgo::baseline:
      return "baseline";
    case BenchAlgo::qkmeans:
      return "qkmeans";
    case BenchAlgo::dckmeans:
      return "dckmeans";
  }
  return "?";
}

std::unique_ptr<DeletionAlgorithm> make_algorithm(const BenchConfig& cfg) {
  return make_algorithm_impl(cfg, false);
}

BenchReport run_benchmark_with(
    const LabeledDataset& dataset, const BenchConfig& cfg,
    const std::function<std::unique_ptr<DeletionAlgorithm>()>& factory) {
  validate_config(dataset, cfg);
  ThreadGuard guard;
  set_max_threads(cfg.threads);

  BenchReport report;
  report.algorithm = algo_name(cfg.algo);
  report.n = dataset.data.live_count();
  report.d = dataset.data.dim();
  report.k = cfg.k;
  report.m = cfg.m;
  report.iters = cfg.iters;
  report.gamma = cfg.gamma;
  if (cfg.algo == BenchAlgo::qkmeans) report.epsilon = cfg.epsilon;
  if (cfg.algo == BenchAlgo::dckmeans) {
    report.width = cfg.width;
    report.height = cfg.height;
    report.width_from_heuristic = cfg.width_from_heuristic;
  }
  report.train_seed = cfg.train_seed;
  report.stream_seed = cfg.stream_seed;
  report.metrics_seed = cfg.metrics_seed;
  report.threads = cfg.threads;
  report.kernel_backend = kernels::backend_name(kernels::active_backend());

  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    DataMatrix data = dataset.data;
    auto algo = factory();

    BenchReplicate rep;
    const auto t_train = Clock::now();
    algo->train(data, mix_seed(cfg.train_seed, r));
    rep.train_seconds = seconds_since(t_train);

    const DeletionStream stream =
        gen_deletion_stream(data, cfg.m, mix_seed(cfg.stream_seed, r));
    if (algo->centroids().size() > 0)
      rep.initial_loss = kmeans_loss(data, algo->centroids());

    double total = rep.train_seconds;
    std::size_t next_checkpoint = 0;
    for (std::size_t j = 1; j <= cfg.m; ++j) {
      const RowId row = stream.ids[j - 1];
      const auto t_req = Clock::now();
      const bool retrained = algo->delete_row(data, row);
      const double elapsed = seconds_since(t_req);
      total += elapsed;
      rep.requests.push_back(BenchRequest{elapsed, retrained});
      if (retrained) rep.retrain_events.push_back(j);

      if (next_checkpoint < cfg.checkpoints.size() &&
          cfg.checkpoints[next_checkpoint] == j) {
        ++next_checkpoint;
        QualityReport q;
        const Assignment a = assign(data, algo->centroids());
        q.loss = a.loss;
        if (cfg.baseline_loss) q.ratio = loss_ratio(a.loss, *cfg.baseline_loss);
        q.subsample_seed = mix_seed(cfg.metrics_seed, r, j);
        RngStream metric_rng(q.subsample_seed);
        q.silhouette = silhouette(data, a, cfg.silhouette_cap, metric_rng);
        if (!dataset.labels.empty()) {
          std::vector<int> pred, truth;
          data.for_each_live([&](RowId id, const double*) {
            pred.push_back(static_cast<int>(a.cluster_of[id]));
            truth.push_back(dataset.labels[id]);
          });
          q.nmi = nmi(pred, truth);
        }
        rep.checkpoints.emplace_back(j, q);
      }
    }
    rep.amortized_total = total / static_cast<double>(cfg.m);
    report.replicates.push_back(std::move(rep));
  }

  double train_sum = 0.0, amort_sum = 0.0;
  for (const BenchReplicate& rep : report.replicates) {
    train_sum += rep.train_seconds;
    amort_sum += rep.amortized_total;
    report.retrain_total += rep.retrain_events.size();
  }
  const double count = static_cast<double>(report.replicates.size());
  report.train_mean = train_sum / count;
  report.amortized_mean = amort_sum / count;
  if (report.replicates.size() > 1) {
    double ss = 0.0;
    for (const BenchReplicate& rep : report.replicates) {
      const double delta = rep.amortized_total - report.amortized_mean;
      ss += delta * delta;
    }
    report.amortized_std = std::sqrt(ss / (count - 1.0));
  }
  return report;
}

BenchReport run_benchmark(const LabeledDataset& dataset, const BenchConfig& cfg) {
  return run_benchmark_with(dataset, cfg,
                            [&cfg] { return make_algorithm_impl(cfg, false); });
}

EqualityVerdict deletion_equality_test(const BenchConfig& cfg,
                                       const LabeledDataset& tiny, RowId row,
                                       std::size_t trials, double significance,
                                       std::uint64_t seed, bool sabotage) {
  if (tiny.data.live_count() > 50)
    throw DataError("deletion_equality_test: dataset must have <= 50 live rows");
  if (trials < 1000)
    throw DataError("deletion_equality_test: needs >= 1000 trials");
  if (!tiny.data.is_live(row))
    throw DataError("deletion_equality_test: row is not live");

  std::vector<double> loss_a(trials), loss_b(trials);
  std::vector<double> fp_a(trials), fp_b(trials);

  for (std::size_t t = 0; t < trials; ++t) {
    {
      // Train on the full dataset, then delete.
      DataMatrix data = tiny.data;
      auto algo = make_algorithm_impl(cfg, sabotage);
      algo->train(data, mix_seed(seed, 2 * t));
      algo->delete_row(data, row);
      loss_a[t] = kmeans_loss(data, algo->centroids());
      fp_a[t] = centroid_fingerprint(algo->centroids());
    }
    {
      // Train on the dataset without the row.
      DataMatrix data = tiny.data;
      data.delete_row(row);
      auto algo = make_algorithm_impl(cfg, false);
      algo->train(data, mix_seed(seed, 2 * t + 1));
      loss_b[t] = kmeans_loss(data, algo->centroids());
      fp_b[t] = centroid_fingerprint(algo->centroids());
    }
  }

  EqualityVerdict v;
  v.trials = trials;
  v.loss_ks = ks_two_sample(loss_a, loss_b, significance);
  v.fingerprint_ks = ks_two_sample(fp_a, fp_b, significance);
  v.pass = v.loss_ks.pass && v.fingerprint_ks.pass;
  return v;
}

namespace {

nlohmann::json quality_to_json(const QualityReport& q) {
  nlohmann::json j;
  j["loss"] = q.loss;
  if (q.ratio) j["loss_ratio"] = *q.ratio;
  j["silhouette"] = q.silhouette;
  if (q.nmi) j["nmi"] = *q.nmi;
  j["subsample_seed"] = q.subsample_seed;
  return j;
}

}  // namespace

void emit_report(const BenchReport& report, const std::string& format,
                 const std::string& path) {
  if (format != "json" && format != "csv")
    throw DataError("emit_report: unknown format '" + format + "'");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);

  if (format == "json") {
    nlohmann::json j;
    j["schema"] = "delkm-bench-report/1";
    j["algorithm"] = report.algorithm;
    j["n"] = report.n;
    j["d"] = report.d;
    j["k"] = report.k;
    j["m"] = report.m;
    j["iters"] = report.iters;
    j["gamma"] = report.gamma;
    if (report.epsilon) j["epsilon"] = *report.epsilon;
    if (report.width) j["width"] = *report.width;
    if (report.height) j["height"] = *report.height;
    j["width_from_heuristic"] = report.width_from_heuristic;
    j["seeds"] = {{"train", report.train_seed},
                  {"stream", report.stream_seed},
                  {"metrics", report.metrics_seed}};
    j["threads"] = report.threads;
    j["kernel_backend"] = report.kernel_backend;
    j["summary"] = {{"train_mean_seconds", report.train_mean},
                    {"amortized_mean_seconds", report.amortized_mean},
                    {"amortized_std_seconds", report.amortized_std},
                    {"retrain_total", report.retrain_total}};
    nlohmann::json reps = nlohmann::json::array();
    for (const BenchReplicate& rep : report.replicates) {
      nlohmann::json jr;
      jr["train_seconds"] = rep.train_seconds;
      jr["initial_loss"] = rep.initial_loss;
      jr["amortized_total_seconds"] = rep.amortized_total;
      jr["retrain_events"] = rep.retrain_events;
      nlohmann::json secs = nlohmann::json::array();
      for (const BenchRequest& req : rep.requests) secs.push_back(req.seconds);
      jr["request_seconds"] = std::move(secs);
      nlohmann::json cps = nlohmann::json::array();
      for (const auto& [index, quality] : rep.checkpoints) {
        nlohmann::json jc = quality_to_json(quality);
        jc["request"] = index;
        cps.push_back(std::move(jc));
      }
      jr["checkpoints"] = std::move(cps);
      reps.push_back(std::move(jr));
    }
    j["replicates"] = std::move(reps);
    out << j.dump(2) << '\n';
  } else {
    if (report.replicates.empty()) throw DataError("emit_report: empty report");
    const BenchReplicate& rep = report.replicates.front();
    out << "request_index,seconds,cumulative_amortized,retrained\n";
    double running = rep.train_seconds;
    for (std::size_t j = 0; j < rep.requests.size(); ++j) {
      running += rep.requests[j].seconds;
      out << (j + 1) << ',' << rep.requests[j].seconds << ','
          << running / static_cast<double>(j + 1) << ','
          << (rep.requests[j].retrained ? 1 : 0) << '\n';
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace delkm
