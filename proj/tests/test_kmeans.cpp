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
#include <cmath>
#include <vector>

#include "delkm/dataset.hpp"
#include "delkm/errors.hpp"
#include "delkm/kmeans.hpp"
#include "delkm/parallel.hpp"
#include "oracles.hpp"

using namespace delkm;

TEST_SUITE("kmeans") {

TEST_CASE("seeding on a single point is forced") {
  DataMatrix m({0.5, 0.5}, 2);
  RngStream rng(1);
  const SeedSet s = kmeanspp_init(m, 1, rng);
  REQUIRE(s.rows.size() == 1);
  CHECK(s.rows[0] == 0);
  CHECK(s.points.row(0)[0] == 0.5);
  CHECK_THROWS_AS(kmeanspp_init(m, 2, rng), DataError);
}

TEST_CASE("seeding weights follow squared distances") {
  // Points {0, 1, 3}; conditioned on the first pick being 0, the second pick
  // should be 3 with probability 9/10 and 1 with probability 1/10.
  DataMatrix m({0.0, 1.0, 3.0}, 1);
  int first_zero = 0, picked_three = 0;
  for (int t = 0; t < 100000; ++t) {
    RngStream rng(50000 + t);
    const SeedSet s = kmeanspp_init(m, 2, rng);
    if (s.rows[0] != 0) continue;
    ++first_zero;
    if (s.rows[1] == 2) ++picked_three;
  }
  REQUIRE(first_zero > 30000);
  const double freq = static_cast<double>(picked_three) / first_zero;
  const double sigma = std::sqrt(0.9 * 0.1 / first_zero);
  CHECK(std::fabs(freq - 0.9) <= 4.0 * sigma);
}

TEST_CASE("seeding with k = n picks every point once, duplicates included") {
  DataMatrix m({1.0, 1.0, 1.0, 2.0}, 1);  // two identical points
  RngStream rng(8);
  const SeedSet s = kmeanspp_init(m, 4, rng);
  std::vector<RowId> rows = s.rows;
  std::sort(rows.begin(), rows.end());
  CHECK(rows == std::vector<RowId>{0, 1, 2, 3});
}

TEST_CASE("assign breaks ties toward the lower cluster and counts sizes") {
  DataMatrix m({0.0, 2.0}, 1);
  const CentroidSet c({0.0, 2.0}, 1);
  const Assignment a = assign(m, c);
  CHECK(a.sizes == std::vector<std::size_t>{1, 1});
  CHECK(a.loss == 0.0);

  // A point equidistant from centroids 0 and 2.
  DataMatrix mid({1.0}, 1);
  const CentroidSet three({0.0, 5.0, 2.0}, 1);
  CHECK(assign(mid, three).cluster_of[0] == 0);
}

TEST_CASE("assign is deterministic and drops exactly one size on deletion") {
  const LabeledDataset ds = gen_gaussian_mixture(40, 2, 3, 0.2, 21);
  DataMatrix data = ds.data;
  RngStream rng(2);
  const SeedSet s = kmeanspp_init(data, 3, rng);
  const Assignment a1 = assign(data, s.points);
  const Assignment a2 = assign(data, s.points);
  CHECK(a1.cluster_of == a2.cluster_of);
  CHECK(a1.loss == a2.loss);

  const RowId victim = 17;
  const std::uint32_t cluster = a1.cluster_of[victim];
  data.delete_row(victim);
  const Assignment a3 = assign(data, s.points);
  for (std::size_t c = 0; c < 3; ++c)
    CHECK(a3.sizes[c] == a1.sizes[c] - (c == cluster ? 1 : 0));
}

TEST_CASE("centroids_of averages members and flags empty clusters") {
  DataMatrix m({0.0, 2.0, 4.0}, 1);
  Assignment a;
  a.cluster_of = {0, 0, 0};
  a.sizes = {3, 0};
  const Means means = centroids_of(m, a, 2);
  CHECK(means.centroids.row(0)[0] == 2.0);
  CHECK(means.counts[0] == 3);
  CHECK(means.counts[1] == 0);

  DataMatrix one({7.5}, 1);
  Assignment b;
  b.cluster_of = {1};
  b.sizes = {0, 1};
  CHECK(centroids_of(one, b, 2).centroids.row(1)[0] == 7.5);
}

TEST_CASE("loss matches small hand-computed instances") {
  DataMatrix m({0.0, 2.0}, 1);
  CHECK(kmeans_loss(m, CentroidSet({1.0}, 1)) == 2.0);

  DataMatrix tri({0.0, 0.0, 2.0, 0.0, 0.0, 2.0}, 2);
  CHECK(kmeans_loss(tri, CentroidSet({0.0, 0.0}, 2)) == 8.0);
}

TEST_CASE("cluster means minimize the within-assignment loss") {
  RngStream rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pts(10 * 2);
    for (double& v : pts) v = rng.uniform01() * 4.0;
    DataMatrix m(pts, 2);
    const CentroidSet anchors({0.5, 0.5, 3.0, 3.0}, 2);
    const Assignment a = assign(m, anchors);
    if (a.sizes[0] == 0 || a.sizes[1] == 0) continue;
    const Means means = centroids_of(m, a, 2);

    // WCSS with the true means, against the same assignment scored with
    // perturbed centers.
    const double best = oracle::naive_wcss(m, a.cluster_of, 2);
    for (int p = 0; p < 10; ++p) {
      std::vector<double> other = means.centroids.values;
      for (double& v : other) v += (rng.uniform01() - 0.5) * 0.3;
      double perturbed = 0.0;
      m.for_each_live([&](RowId id, const double* pt) {
        perturbed += oracle::sq_dist(pt, other.data() + a.cluster_of[id] * 2, 2);
      });
      CHECK(best <= perturbed + 1e-12);
    }
    // And the loss function agrees with the naive oracle on the means.
    const double lib = kmeans_loss(m, means.centroids);
    const double naive = oracle::naive_loss(m, means.centroids.values, 2, 2);
    CHECK(lib == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("lloyd finds the two pair-means on separated pairs") {
  // Two tight pairs; the optimal 2-clustering is one pair per cluster, with
  // centroids at the pair means (verified by enumeration).
  const std::vector<double> pts = {0.0, 0.0, 0.1, 0.0, 5.0, 5.0, 5.1, 5.0};
  DataMatrix m(pts, 2);
  const double optimal = oracle::exact_optimal_loss(pts, 4, 2, 2);
  RngStream rng(6);
  const LloydResult r = lloyd(m, 2, 10, rng);
  CHECK(r.loss_history.back() == doctest::Approx(optimal).epsilon(1e-12));
  std::vector<double> xs = {r.centroids.row(0)[0], r.centroids.row(1)[0]};
  std::sort(xs.begin(), xs.end());
  CHECK(xs[0] == doctest::Approx(0.05));
  CHECK(xs[1] == doctest::Approx(5.05));
}

TEST_CASE("lloyd with zero rounds returns the seeds") {
  const LabeledDataset ds = gen_gaussian_mixture(30, 2, 2, 0.5, 44);
  RngStream rng_a(91), rng_b(91);
  const SeedSet seeds = kmeanspp_init(ds.data, 2, rng_a);
  const LloydResult r = lloyd(ds.data, 2, 0, rng_b);
  CHECK(r.centroids.values == seeds.points.values);
  CHECK(r.iterations == 0);
}

TEST_CASE("block-parallel assignment is bitwise equal to sequential") {
  const LabeledDataset ds = gen_gaussian_mixture(3000, 4, 3, 0.3, 77);
  RngStream rng(78);
  const SeedSet seeds = kmeanspp_init(ds.data, 3, rng);

  const Assignment sequential = assign(ds.data, seeds.points);
  set_max_threads(3);
  const Assignment parallel = assign(ds.data, seeds.points);
  set_max_threads(1);
  CHECK(parallel.cluster_of == sequential.cluster_of);
  CHECK(parallel.sizes == sequential.sizes);
  CHECK(parallel.loss == sequential.loss);  // identical combine order
}

TEST_CASE("lloyd loss never increases") {
  for (int trial = 0; trial < 30; ++trial) {
    const LabeledDataset ds =
        gen_gaussian_mixture(25 + trial, 3, 3, 0.4, 600 + trial);
    RngStream rng(700 + trial);
    const LloydResult r = lloyd(ds.data, 3, 15, rng);
    for (std::size_t t = 1; t < r.loss_history.size(); ++t)
      CHECK(r.loss_history[t] <=
            r.loss_history[t - 1] * (1.0 + 1e-12) + 1e-12);
  }
}

}  // TEST_SUITE
