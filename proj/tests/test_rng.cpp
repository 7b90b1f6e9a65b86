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

#include <cmath>
#include <vector>

#include "delkm/errors.hpp"
#include "delkm/rng.hpp"

using namespace delkm;

TEST_SUITE("rng") {

TEST_CASE("same seed replays the same stream") {
  RngStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.uniform01() == b.uniform01());
    CHECK(a.gaussian() == b.gaussian());
  }
}

TEST_CASE("derive depends on the seed, not the position") {
  RngStream a(7);
  a.next_u64();
  a.next_u64();
  RngStream b(7);
  CHECK(a.derive(3).seed() == b.derive(3).seed());
  CHECK(a.derive(3).seed() != b.derive(4).seed());
}

TEST_CASE("uniform_below stays in range and covers small ranges") {
  RngStream rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const std::size_t v = rng.uniform_below(7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int h : hits) {  // expected 10000 each; 5 sigma ~ 460
    CHECK(h > 9500);
    CHECK(h < 10500);
  }
  CHECK_THROWS_AS(rng.uniform_below(0), DataError);
}

TEST_CASE("gaussian moments look standard-normal") {
  RngStream rng(9);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.gaussian();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("mix_seed separates nearby tags") {
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(3, 1, 2) != mix_seed(3, 2, 1));
}

}  // TEST_SUITE
