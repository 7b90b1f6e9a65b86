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

#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <set>
#include <vector>

#include "delkm/dataset.hpp"
#include "delkm/dckmeans.hpp"
#include "delkm/errors.hpp"
#include "delkm/heuristics.hpp"

using namespace delkm;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> sorted_values(const CentroidSet& c) {
  std::vector<double> v = c.values;
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<std::uint64_t> node_seeds_of(const DcModel& m) {
  std::vector<std::uint64_t> seeds(m.nodes.size());
  for (const DcNode& node : m.nodes) seeds[node.id] = node.seed;
  return seeds;
}

void check_partition_invariant(const DcModel& m, const DataMatrix& data) {
  std::set<RowId> seen;
  std::size_t total = 0;
  for (std::size_t i = m.first_leaf(); i < m.nodes.size(); ++i) {
    for (RowId row : m.nodes[i].rows) {
      CHECK(data.is_live(row));
      CHECK(seen.insert(row).second);  // disjoint
      ++total;
    }
  }
  CHECK(total == data.live_count());
}

}  // namespace

TEST_SUITE("dckmeans") {

TEST_CASE("a single-leaf tree degenerates to the plain solver") {
  const LabeledDataset ds = gen_gaussian_mixture(60, 2, 3, 0.02, 2100);
  DcParams p;
  p.k = 3;
  p.iters = 10;
  p.width = 1;
  p.height = 1;
  RngStream rng(31);
  const DcModel model = dckmeans_train(ds.data, p, rng);
  REQUIRE(model.leaf_count == 1);

  // The root re-clusters the leaf's k centroids with k centers, which can
  // only permute them; compare as multisets against a direct solve that
  // replays the leaf's stream.
  RngStream leaf_rng(model.nodes[model.first_leaf()].seed);
  const LloydResult direct = lloyd(ds.data, 3, 10, leaf_rng);
  CHECK(sorted_values(model.output()) == sorted_values(direct.centroids));
}

TEST_CASE("depth-1 root consumes exactly width*k centroids") {
  const LabeledDataset ds = gen_gaussian_mixture(400, 3, 5, 0.3, 2101);
  DcParams p;
  p.k = 5;
  p.iters = 3;
  p.width = 16;
  p.height = 1;
  RngStream rng(32);
  const DcModel model = dckmeans_train(ds.data, p, rng);
  REQUIRE(model.leaf_count == 16);
  std::size_t root_input = 0;
  for (std::uint32_t child : model.nodes[0].children)
    root_input += model.nodes[child].centroids.size();
  CHECK(root_input == 16 * 5);
  CHECK(model.output().size() == 5);
  check_partition_invariant(model, ds.data);
}

TEST_CASE("leaf count rounds to the nearest power of two") {
  const LabeledDataset ds = gen_gaussian_mixture(100, 2, 2, 0.5, 2102);
  DcParams p;
  p.k = 2;
  p.iters = 2;
  p.width = 5;  // rounds to 4
  RngStream rng(33);
  const DcModel model = dckmeans_train(ds.data, p, rng);
  CHECK(model.leaf_count == 4);
  CHECK(model.params.width == 4);
  CHECK(model.width_requested == 5);
}

TEST_CASE("deletion re-solves only the leaf-to-root path") {
  const LabeledDataset ds = gen_gaussian_mixture(200, 2, 2, 0.4, 2103);
  DcParams p;
  p.k = 2;
  p.iters = 5;
  p.width = 2;
  RngStream rng(34);
  DcModel model = dckmeans_train(ds.data, p, rng);
  DataMatrix data = ds.data;
  REQUIRE(model.leaf_count == 2);

  const std::size_t leaf0 = model.first_leaf();
  const RowId victim = model.nodes[leaf0].rows.front();
  const std::vector<double> other_before = model.nodes[leaf0 + 1].centroids.values;
  const std::uint64_t other_epoch = model.nodes[leaf0 + 1].epoch;

  const DcDeleteResult res = dckmeans_delete(model, data, victim);
  CHECK_FALSE(res.full_retrain);
  CHECK(same_bits(model.nodes[leaf0 + 1].centroids.values, other_before));
  CHECK(model.nodes[leaf0 + 1].epoch == other_epoch);
  CHECK(model.nodes[leaf0].epoch == 1);
  CHECK(model.nodes[0].epoch == 1);
  CHECK(model.leaf_of[victim] == -1);
  check_partition_invariant(model, data);
}

TEST_CASE("deleting the last point of a leaf leaves it empty but functional") {
  // Tiny dataset scattered over 4 leaves: some leaf ends up with one or zero
  // points; drain one completely and make sure the model still answers.
  const LabeledDataset ds = gen_gaussian_mixture(3, 2, 2, 0.3, 2104);
  DcParams p;
  p.k = 2;
  p.iters = 3;
  p.width = 4;
  RngStream rng(35);
  DcModel model = dckmeans_train(ds.data, p, rng);
  DataMatrix data = ds.data;

  // Find the smallest non-empty leaf and drain it.
  std::size_t smallest = model.first_leaf();
  for (std::size_t i = model.first_leaf(); i < model.nodes.size(); ++i) {
    if (model.nodes[i].rows.empty()) continue;
    if (model.nodes[smallest].rows.empty() ||
        model.nodes[i].rows.size() < model.nodes[smallest].rows.size())
      smallest = i;
  }
  while (!model.nodes[smallest].rows.empty())
    dckmeans_delete(model, data, model.nodes[smallest].rows.front());

  CHECK(model.nodes[smallest].centroids.size() == 0);
  CHECK(model.output().size() >= 1);
  check_partition_invariant(model, data);
}

TEST_CASE("deletions replay to the exact post-deletion state") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LabeledDataset ds =
        gen_gaussian_mixture(50 + 25 * (seed % 4), 2, 3, 0.2, 2200 + seed);
    DcParams p;
    p.k = 3;
    p.iters = 4;
    p.width = 4;
    RngStream rng(2300 + seed);
    DcModel model = dckmeans_train(ds.data, p, rng);
    DataMatrix data = ds.data;

    for (int del = 0; del < 3; ++del) {
      const DeletionStream pick =
          gen_deletion_stream(data, 1, mix_seed(seed, del));
      dckmeans_delete(model, data, pick.ids[0]);
    }

    const DcModel replayed =
        dckmeans_replay(data, model.params, model.leaf_of, node_seeds_of(model));
    REQUIRE(replayed.nodes.size() == model.nodes.size());
    for (std::size_t i = 0; i < model.nodes.size(); ++i) {
      CHECK(same_bits(replayed.nodes[i].centroids.values,
                      model.nodes[i].centroids.values));
      CHECK(replayed.nodes[i].rows == model.nodes[i].rows);
    }
  }
}

TEST_CASE("heuristic width re-evaluation forces a full retrain at the step") {
  // heuristic_width steps from 8 to 4 between n=393 and n=392.
  const LabeledDataset ds = gen_gaussian_mixture(393, 1, 1, 0.2, 2105);
  DcParams p;
  p.k = 3;
  p.iters = 3;
  p.width = heuristic_width(393);
  p.width_from_heuristic = true;
  RngStream rng(36);
  DcModel model = dckmeans_train(ds.data, p, rng);
  CHECK(model.leaf_count == 8);
  DataMatrix data = ds.data;

  const DcDeleteResult res = dckmeans_delete(model, data, 100);
  CHECK(res.full_retrain);
  CHECK(model.leaf_count == 4);
  CHECK(model.n_live == 392);
  check_partition_invariant(model, data);

  // One more deletion: 391^0.3 still rounds to 4, so no retrain.
  const DcDeleteResult res2 = dckmeans_delete(model, data, 101);
  CHECK_FALSE(res2.full_retrain);
}

TEST_CASE("row scatter is uniform enough to balance the leaves") {
  // With width n^0.3 the largest leaf should stay within 3x the mean load.
  const std::size_t n = 10000;
  const std::size_t w = heuristic_width(n);
  DataMatrix data(std::vector<double>(n, 0.0), 1);
  for (int run = 0; run < 100; ++run) {
    RngStream rng(4000 + run);
    const auto scatter = sample_leaf_scatter(data, w, rng);
    std::vector<std::size_t> load(w, 0);
    for (RowId id = 0; id < n; ++id) ++load[scatter[id]];
    const std::size_t max_load = *std::max_element(load.begin(), load.end());
    CHECK(max_load <= 3 * (n / w));
  }
}

TEST_CASE("training is deterministic and validates inputs") {
  const LabeledDataset ds = gen_gaussian_mixture(40, 2, 2, 0.3, 2106);
  DcParams p;
  p.k = 2;
  p.iters = 3;
  p.width = 4;
  RngStream a(9), b(9);
  const DcModel ma = dckmeans_train(ds.data, p, a);
  const DcModel mb = dckmeans_train(ds.data, p, b);
  CHECK(same_bits(ma.output().values, mb.output().values));
  CHECK(ma.leaf_of == mb.leaf_of);

  DcParams bad = p;
  bad.k = 0;
  RngStream c(10);
  CHECK_THROWS_AS(dckmeans_train(ds.data, bad, c), DataError);
  DataMatrix data = ds.data;
  DcModel m = ma;
  CHECK_THROWS_AS(dckmeans_delete(m, data, 99999), DataError);
}

}  // TEST_SUITE
