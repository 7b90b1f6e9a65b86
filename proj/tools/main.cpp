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

// delkm command line: dataset generation, training, single deletions,
// the online-deletion benchmark, quality evaluation, and the statistical
// deletion-equality check.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error,
// 4 failed statistical verdict (deltest only).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delkm/bench.hpp"
#include "delkm/dataset.hpp"
#include "delkm/dckmeans.hpp"
#include "delkm/errors.hpp"
#include "delkm/heuristics.hpp"
#include "delkm/kernels.hpp"
#include "delkm/kmeans.hpp"
#include "delkm/qkmeans.hpp"
#include "delkm/serialize.hpp"

namespace {

using namespace delkm;

constexpr std::uint64_t kDefaultSeed = 12345;

struct DatasetOptions {
  std::string csv_path;
  bool has_header = false;
  std::int64_t label_col = -1;
  std::string synthetic;
  std::size_t n_per_cluster = 0;
  std::size_t dim = 0;
  std::size_t clusters = 0;
  double variance = 0.8;
  std::uint64_t data_seed = kDefaultSeed;
  bool no_scale = false;
};

void add_dataset_options(CLI::App* cmd, DatasetOptions& opt) {
  auto* csv = cmd->add_option("--csv", opt.csv_path,
                              "Load a comma-separated numeric file");
  cmd->add_flag("--has-header", opt.has_header,
                "First CSV line is a header row");
  cmd->add_option("--label-col", opt.label_col,
                  "CSV column holding the integer class label");
  auto* syn = cmd->add_option("--synthetic", opt.synthetic,
                              "Generate a dataset instead (choice: gaussian)")
                  ->check(CLI::IsMember({"gaussian"}));
  cmd->add_option("--n-per-cluster", opt.n_per_cluster,
                  "Synthetic: points per mixture component");
  cmd->add_option("--dim", opt.dim, "Synthetic: dimensionality");
  cmd->add_option("--clusters", opt.clusters,
                  "Synthetic: number of mixture components");
  cmd->add_option("--variance", opt.variance,
                  "Synthetic: per-coordinate variance")->capture_default_str();
  cmd->add_option("--data-seed", opt.data_seed, "Synthetic: generator seed")->capture_default_str();
  cmd->add_flag("--no-scale", opt.no_scale,
                "Skip the per-dimension min-max scaling applied at ingestion");
  csv->excludes(syn);
  syn->excludes(csv);
}

LabeledDataset load_dataset(const DatasetOptions& opt, bool scale) {
  LabeledDataset ds;
  if (!opt.csv_path.empty()) {
    std::optional<std::size_t> label;
    if (opt.label_col >= 0) label = static_cast<std::size_t>(opt.label_col);
    ds = load_csv(opt.csv_path, opt.has_header, label);
  } else if (opt.synthetic == "gaussian") {
    if (opt.n_per_cluster == 0 || opt.dim == 0 || opt.clusters == 0)
      throw CLI::ValidationError(
          "--synthetic gaussian needs --n-per-cluster, --dim and --clusters");
    ds = gen_gaussian_mixture(opt.n_per_cluster, opt.dim, opt.clusters,
                              opt.variance, opt.data_seed);
  } else {
    throw CLI::ValidationError("provide a dataset via --csv or --synthetic");
  }
  if (scale) {
    auto [scaled, params] = minmax_scale(ds.data);
    ds.data = std::move(scaled);
  }
  return ds;
}

struct AlgoOptions {
  std::string algo;
  std::size_t k = 0;
  std::size_t iters = 10;
  double gamma = 0.2;
  double epsilon = 0.0;
  std::size_t width = 0;
  std::size_t height = 1;
  bool heuristic = false;
  /// Set by resolve_params when the width actually came from the rule of
  /// thumb (an explicit --width wins over --heuristic).
  bool width_was_heuristic = false;
};

void add_algo_options(CLI::App* cmd, AlgoOptions& opt,
                      const std::vector<std::string>& algos) {
  cmd->add_option("--algo", opt.algo, "Algorithm")
      ->required()
      ->check(CLI::IsMember(algos));
  cmd->add_option("--k", opt.k, "Number of clusters")->required();
  cmd->add_option("--iters", opt.iters, "Update rounds (T)")->capture_default_str();
  cmd->add_option("--gamma", opt.gamma, "Balance ratio for qkmeans")->capture_default_str();
  cmd->add_option("--epsilon", opt.epsilon, "Lattice spacing for qkmeans");
  cmd->add_option("--width", opt.width, "Tree width for dckmeans");
  cmd->add_option("--height", opt.height, "Tree height for dckmeans")->capture_default_str();
  cmd->add_flag("--heuristic", opt.heuristic,
                "Derive epsilon/width from the built-in rules of thumb");
}

/// Fills in epsilon/width from the rules of thumb, so the library layers
/// only ever see explicit values. Echoes what it resolved.
void resolve_params(AlgoOptions& opt, std::size_t n, std::size_t d) {
  if (opt.algo == "qkmeans") {
    if (opt.epsilon <= 0.0) {
      if (!opt.heuristic)
        throw CLI::ValidationError("qkmeans needs --epsilon or --heuristic");
      opt.epsilon = heuristic_epsilon(n, opt.k, d);
      std::cout << "resolved epsilon=" << opt.epsilon << " (heuristic)\n";
    }
  } else if (opt.algo == "dckmeans") {
    if (opt.width == 0) {
      if (!opt.heuristic)
        throw CLI::ValidationError("dckmeans needs --width or --heuristic");
      opt.width = heuristic_width(n);
      opt.width_was_heuristic = true;
      std::cout << "resolved w=" << opt.width << " (heuristic)\n";
    }
  }
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// ---------------------------------------------------------------------------
// gen

int cmd_gen(const DatasetOptions& data_opt, const std::string& out,
            bool no_label) {
  LabeledDataset ds = gen_gaussian_mixture(data_opt.n_per_cluster, data_opt.dim,
                                           data_opt.clusters, data_opt.variance,
                                           data_opt.data_seed);
  write_dataset_csv(ds, out, !no_label);
  std::cout << "wrote " << ds.data.total_rows() << " rows, d=" << ds.data.dim()
            << (no_label ? "" : ", label column 0") << " -> " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const DatasetOptions& data_opt, AlgoOptions algo_opt,
              std::uint64_t seed, const std::string& out,
              const std::string& centroids_csv) {
  LabeledDataset ds = load_dataset(data_opt, !data_opt.no_scale);
  const std::size_t n = ds.data.live_count();
  const std::size_t d = ds.data.dim();
  resolve_params(algo_opt, n, d);

  ModelFile file;
  file.kind = algo_opt.algo;
  file.scaled = !data_opt.no_scale;
  file.fingerprint = dataset_fingerprint(ds.data);

  RngStream rng(seed);
  double loss = 0.0;
  if (algo_opt.algo == "baseline") {
    file.baseline = lloyd_train(ds.data, algo_opt.k, algo_opt.iters, rng);
    loss = file.baseline.loss;
  } else if (algo_opt.algo == "qkmeans") {
    QkParams p;
    p.k = algo_opt.k;
    p.max_iters = algo_opt.iters;
    p.gamma = algo_opt.gamma;
    p.epsilon = algo_opt.epsilon;
    file.qk = qkmeans_train(ds.data, p, rng);
    loss = kmeans_loss(ds.data, file.qk.final_centroids);
  } else {
    DcParams p;
    p.k = algo_opt.k;
    p.iters = algo_opt.iters;
    p.width = algo_opt.width;
    p.height = algo_opt.height;
    p.width_from_heuristic = algo_opt.width_was_heuristic;
    file.dc = dckmeans_train(ds.data, p, rng);
    loss = kmeans_loss(ds.data, file.dc.output());
  }
  save_model_file(file, out);
  if (!centroids_csv.empty()) {
    const CentroidSet& c = algo_opt.algo == "baseline" ? file.baseline.centroids
                           : algo_opt.algo == "qkmeans"
                               ? file.qk.final_centroids
                               : file.dc.output();
    write_centroids_csv(c, centroids_csv);
  }
  std::cout << "algo=" << algo_opt.algo << " n=" << n << " d=" << d
            << " k=" << algo_opt.k << " iters=" << algo_opt.iters;
  if (algo_opt.algo == "qkmeans")
    std::cout << " gamma=" << algo_opt.gamma << " epsilon=" << algo_opt.epsilon;
  if (algo_opt.algo == "dckmeans")
    std::cout << " width=" << algo_opt.width << " height=" << algo_opt.height;
  std::cout << " seed=" << seed << " loss=" << loss << "\nmodel -> " << out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// delete

/// Brings a freshly loaded dataset in sync with the model's recorded state:
/// same scaling decision, then the already-deleted rows, then the
/// fingerprint must match.
LabeledDataset sync_dataset(const ModelFile& file, const DatasetOptions& opt) {
  LabeledDataset ds = load_dataset(opt, file.scaled);
  for (RowId row : file.deleted_rows) ds.data.delete_row(row);
  if (dataset_fingerprint(ds.data) != file.fingerprint)
    throw DataError(
        "dataset fingerprint mismatch: the file does not match the data the "
        "model was trained on (or --no-scale/--label-col differ)");
  return ds;
}

int cmd_delete(const DatasetOptions& data_opt, const std::string& model_path,
               RowId row, std::string out) {
  if (out.empty()) out = model_path;
  ModelFile file = load_model_file(model_path);
  LabeledDataset ds = sync_dataset(file, data_opt);

  const auto start = std::chrono::steady_clock::now();
  bool retrained = false;
  if (file.kind == "baseline") {
    lloyd_delete(file.baseline, ds.data, row);
    retrained = true;
  } else if (file.kind == "qkmeans") {
    retrained = qkmeans_delete(file.qk, ds.data, row).retrained;
  } else if (file.kind == "dckmeans") {
    retrained = dckmeans_delete(file.dc, ds.data, row).full_retrain;
  } else {
    throw DataError("unknown model kind '" + file.kind + "'");
  }
  const double seconds = elapsed_seconds(start);

  file.deleted_rows.push_back(row);
  file.fingerprint = dataset_fingerprint(ds.data);
  save_model_file(file, out);
  std::cout << "retrained=" << (retrained ? "true" : "false")
            << " seconds=" << seconds << " live=" << ds.data.live_count()
            << "\nmodel -> " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bench

BenchAlgo parse_bench_algo(const std::string& name) {
  if (name == "baseline") return BenchAlgo::baseline;
  if (name == "qkmeans") return BenchAlgo::qkmeans;
  return BenchAlgo::dckmeans;
}

int cmd_bench(const DatasetOptions& data_opt, AlgoOptions algo_opt,
              std::size_t m, std::size_t replicates,
              std::vector<std::size_t> checkpoints, bool checkpoints_given,
              std::uint64_t seed, std::uint64_t stream_seed,
              std::uint64_t metrics_seed, const std::string& out_dir,
              unsigned threads, std::size_t silhouette_cap) {
  LabeledDataset ds = load_dataset(data_opt, !data_opt.no_scale);
  const std::size_t n = ds.data.live_count();
  const std::size_t d = ds.data.dim();

  if (!checkpoints_given) {
    for (std::size_t c : {std::size_t{1}, std::size_t{10}, std::size_t{100},
                          std::size_t{1000}})
      if (c <= m) checkpoints.push_back(c);
  } else {
    for (std::size_t c : checkpoints)
      if (c < 1 || c > m)
        throw CLI::ValidationError("checkpoint " + std::to_string(c) +
                                   " outside [1, m]");
  }

  std::vector<std::string> algos;
  if (algo_opt.algo == "all")
    algos = {"baseline", "qkmeans", "dckmeans"};
  else
    algos = {algo_opt.algo};

  std::filesystem::create_directories(out_dir);

  std::optional<double> baseline_amortized;
  std::optional<double> baseline_loss;
  for (const std::string& name : algos) {
    AlgoOptions resolved = algo_opt;
    resolved.algo = name;
    resolve_params(resolved, n, d);

    BenchConfig cfg;
    cfg.algo = parse_bench_algo(name);
    cfg.m = m;
    cfg.k = resolved.k;
    cfg.iters = resolved.iters;
    cfg.gamma = resolved.gamma;
    cfg.epsilon = resolved.epsilon;
    cfg.width = std::max<std::size_t>(resolved.width, 1);
    cfg.height = resolved.height;
    cfg.width_from_heuristic = resolved.width_was_heuristic;
    cfg.train_seed = seed;
    cfg.stream_seed = stream_seed;
    cfg.metrics_seed = metrics_seed;
    cfg.checkpoints = checkpoints;
    cfg.replicates = replicates;
    cfg.baseline_loss = baseline_loss;
    cfg.silhouette_cap = silhouette_cap;
    cfg.threads = threads;

    const BenchReport report = run_benchmark(ds, cfg);
    emit_report(report, "json", out_dir + "/" + name + ".json");
    emit_report(report, "csv", out_dir + "/" + name + ".csv");

    std::cout << name << ": amortized " << report.amortized_mean << " +/- "
              << report.amortized_std << " s, retrains " << report.retrain_total;
    if (cfg.algo == BenchAlgo::baseline) {
      baseline_amortized = report.amortized_mean;
      double loss_sum = 0.0;
      for (const BenchReplicate& r : report.replicates)
        loss_sum += r.initial_loss;
      baseline_loss = loss_sum / static_cast<double>(report.replicates.size());
    } else if (baseline_amortized) {
      std::cout << ", speedup " << *baseline_amortized / report.amortized_mean
                << "x";
    }
    std::cout << "\n";
  }
  std::cout << "reports -> " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const DatasetOptions& data_opt, const std::string& model_path,
             std::size_t sample_cap, std::uint64_t seed) {
  const ModelFile file = load_model_file(model_path);
  LabeledDataset ds = sync_dataset(file, data_opt);

  const CentroidSet* centroids = nullptr;
  if (file.kind == "baseline")
    centroids = &file.baseline.centroids;
  else if (file.kind == "qkmeans")
    centroids = &file.qk.final_centroids;
  else
    centroids = &file.dc.output();

  const Assignment a = assign(ds.data, *centroids);
  RngStream rng(seed);
  const double sil = silhouette(ds.data, a, sample_cap, rng);
  std::cout << "n=" << ds.data.live_count() << " loss=" << a.loss
            << " silhouette=" << sil;
  if (!ds.labels.empty()) {
    std::vector<int> pred, truth;
    ds.data.for_each_live([&](RowId id, const double*) {
      pred.push_back(static_cast<int>(a.cluster_of[id]));
      truth.push_back(ds.labels[id]);
    });
    std::cout << " nmi=" << nmi(pred, truth);
  }
  std::cout << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// deltest

int cmd_deltest(const DatasetOptions& data_opt, AlgoOptions algo_opt, RowId row,
                std::size_t trials, double significance, std::uint64_t seed,
                bool broken) {
  LabeledDataset ds = load_dataset(data_opt, !data_opt.no_scale);
  resolve_params(algo_opt, ds.data.live_count(), ds.data.dim());

  BenchConfig cfg;
  cfg.algo = parse_bench_algo(algo_opt.algo);
  cfg.k = algo_opt.k;
  cfg.iters = algo_opt.iters;
  cfg.gamma = algo_opt.gamma;
  cfg.epsilon = algo_opt.epsilon;
  cfg.width = std::max<std::size_t>(algo_opt.width, 1);
  cfg.height = algo_opt.height;

  const EqualityVerdict v =
      deletion_equality_test(cfg, ds, row, trials, significance, seed, broken);
  std::cout << "loss KS: D=" << v.loss_ks.statistic
            << " threshold=" << v.loss_ks.threshold << " p=" << v.loss_ks.p_value
            << "\nfingerprint KS: D=" << v.fingerprint_ks.statistic
            << " threshold=" << v.fingerprint_ks.threshold
            << " p=" << v.fingerprint_ks.p_value << "\nverdict "
            << (v.pass ? "PASS" : "FAIL") << " (" << v.trials
            << " trials per side, significance " << significance << ")\n";
  return v.pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deletion-efficient k-means clustering"};
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  std::string kernel_backend = "auto";
  app.add_option("--kernel", kernel_backend,
                 "Arithmetic kernel backend (auto|scalar|avx2|neon)")
      ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));

  // gen
  DatasetOptions gen_data;
  std::string gen_out;
  bool gen_no_label = false;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic mixture CSV");
  gen->add_option("--out", gen_out, "Output CSV path")->required();
  gen->add_option("--n-per-cluster", gen_data.n_per_cluster,
                  "Points per mixture component")
      ->required();
  gen->add_option("--dim", gen_data.dim, "Dimensionality")->required();
  gen->add_option("--clusters", gen_data.clusters, "Mixture components")
      ->required();
  gen->add_option("--variance", gen_data.variance, "Per-coordinate variance")->capture_default_str();
  gen->add_option("--seed", gen_data.data_seed, "Generator seed")->capture_default_str()
      ->envname("DELKM_SEED");
  gen->add_flag("--no-label", gen_no_label, "Omit the label column");

  // train
  DatasetOptions train_data;
  AlgoOptions train_algo;
  std::string train_out;
  std::uint64_t train_seed = kDefaultSeed;
  auto* train = app.add_subcommand("train", "Train a model and save it");
  add_dataset_options(train, train_data);
  add_algo_options(train, train_algo, {"baseline", "qkmeans", "dckmeans"});
  train->add_option("--seed", train_seed, "Training seed")->capture_default_str()
      ->envname("DELKM_SEED");
  train->add_option("--out", train_out, "Model output path")->required();
  std::string train_centroids_csv;
  train->add_option("--centroids-csv", train_centroids_csv,
                    "Also write the centroids as CSV, one per row");

  // delete
  DatasetOptions del_data;
  std::string del_model, del_out;
  RowId del_row = 0;
  auto* del = app.add_subcommand("delete", "Delete one row from a saved model");
  add_dataset_options(del, del_data);
  del->add_option("--model", del_model, "Model file")->required();
  del->add_option("--row", del_row, "Row id to delete")->required();
  del->add_option("--out", del_out, "Output model path (default: in place)");

  // bench
  DatasetOptions bench_data;
  AlgoOptions bench_algo;
  std::size_t bench_m = 0, bench_replicates = 5, bench_cap = 10000;
  std::vector<std::size_t> bench_checkpoints;
  std::uint64_t bench_seed = kDefaultSeed, bench_stream_seed = 0,
                bench_metrics_seed = 0;
  std::string bench_out_dir;
  unsigned bench_threads = 1;
  auto* bench =
      app.add_subcommand("bench", "Run the online deletion benchmark");
  add_dataset_options(bench, bench_data);
  add_algo_options(bench, bench_algo,
                   {"baseline", "qkmeans", "dckmeans", "all"});
  bench->add_option("--m", bench_m, "Deletion requests per replicate")
      ->required();
  bench->add_option("--replicates", bench_replicates, "Replicates")->capture_default_str();
  auto* ckpt_opt =
      bench
          ->add_option("--checkpoints", bench_checkpoints,
                       "Quality checkpoint indices (default 1,10,100,1000 "
                       "clipped to m)")
          ->delimiter(',');
  bench->add_option("--seed", bench_seed, "Training seed")->capture_default_str()
      ->envname("DELKM_SEED");
  bench->add_option("--stream-seed", bench_stream_seed,
                    "Deletion stream seed (default: derived)")->capture_default_str();
  bench->add_option("--metrics-seed", bench_metrics_seed,
                    "Subsampling seed (default: derived)")->capture_default_str();
  bench->add_option("--out-dir", bench_out_dir, "Report directory")->required();
  bench->add_option("--threads", bench_threads,
                    "Worker threads for internal loops (labeled in report)")->capture_default_str();
  bench->add_option("--silhouette-cap", bench_cap,
                    "Silhouette subsample size")->capture_default_str();

  // eval
  DatasetOptions eval_data;
  std::string eval_model;
  std::size_t eval_cap = 10000;
  std::uint64_t eval_seed = kDefaultSeed;
  auto* eval =
      app.add_subcommand("eval", "Score a saved model on its dataset");
  add_dataset_options(eval, eval_data);
  eval->add_option("--model", eval_model, "Model file")->required();
  eval->add_option("--sample-cap", eval_cap, "Silhouette subsample size")->capture_default_str();
  eval->add_option("--seed", eval_seed, "Subsample seed")->capture_default_str()
      ->envname("DELKM_SEED");

  // deltest
  DatasetOptions dt_data;
  AlgoOptions dt_algo;
  RowId dt_row = 0;
  std::size_t dt_trials = 2000;
  double dt_significance = 0.01;
  std::uint64_t dt_seed = kDefaultSeed;
  bool dt_broken = false;
  auto* dt = app.add_subcommand(
      "deltest", "Statistical deletion-equality check on a tiny dataset");
  add_dataset_options(dt, dt_data);
  add_algo_options(dt, dt_algo, {"baseline", "qkmeans", "dckmeans"});
  dt->add_option("--row", dt_row, "Row id to delete")->required();
  dt->add_option("--trials", dt_trials, "Trials per side")->capture_default_str();
  dt->add_option("--significance", dt_significance, "KS significance level")->capture_default_str();
  dt->add_option("--seed", dt_seed, "Base seed")->capture_default_str()->envname("DELKM_SEED");
  dt->add_flag("--broken", dt_broken,
               "Sabotage the deletion operation (harness self-check)");

  try {
    app.parse(argc, argv);
    kernels::set_backend(kernel_backend == "scalar"  ? kernels::Backend::scalar
                         : kernel_backend == "avx2"  ? kernels::Backend::avx2
                         : kernel_backend == "neon"  ? kernels::Backend::neon
                                                     : kernels::Backend::auto_detect);

    if (*gen) return cmd_gen(gen_data, gen_out, gen_no_label);
    if (*train) return cmd_train(train_data, train_algo, train_seed, train_out,
                     train_centroids_csv);
    if (*del) return cmd_delete(del_data, del_model, del_row, del_out);
    if (*bench) {
      if (bench_stream_seed == 0) bench_stream_seed = mix_seed(bench_seed, 0xB1);
      if (bench_metrics_seed == 0)
        bench_metrics_seed = mix_seed(bench_seed, 0xB2);
      return cmd_bench(bench_data, bench_algo, bench_m, bench_replicates,
                       bench_checkpoints, ckpt_opt->count() > 0, bench_seed,
                       bench_stream_seed, bench_metrics_seed, bench_out_dir,
                       bench_threads, bench_cap);
    }
    if (*eval) return cmd_eval(eval_data, eval_model, eval_cap, eval_seed);
    if (*dt)
      return cmd_deltest(dt_data, dt_algo, dt_row, dt_trials, dt_significance,
                         dt_seed, dt_broken);
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
