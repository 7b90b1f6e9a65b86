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

#include "delkm/errors.hpp"
#include "delkm/heuristics.hpp"

using namespace delkm;

TEST_SUITE("heuristics") {

TEST_CASE("nearest_pow2 rounds linearly with ties upward") {
  CHECK(nearest_pow2(1.0) == 1);
  CHECK(nearest_pow2(2.9) == 2);
  CHECK(nearest_pow2(3.0) == 4);  // tie between 2 and 4
  CHECK(nearest_pow2(5.9) == 4);
  CHECK(nearest_pow2(6.0) == 8);  // tie between 4 and 8
  CHECK(nearest_pow2(31.6) == 32);
  CHECK_THROWS_AS(nearest_pow2(0.5), DataError);
}

TEST_CASE("granularity rule reproduces worked examples") {
  // n/(k d^1.5) = 160 -> exponent -5.
  CHECK(heuristic_epsilon(100000, 5, 25) == 0.03125);
  // mass of exactly 1000 -> exponent -6.
  CHECK(heuristic_epsilon(5 * 125 * 1000, 5, 25) == 0.015625);
  // mass of exactly 1 -> exponent -3.
  CHECK(heuristic_epsilon(625, 5, 25) == 0.125);
  // Desk-scale benchmark size.
  CHECK(heuristic_epsilon(20000, 5, 25) == 0.03125);
}

TEST_CASE("width rule reproduces worked examples") {
  CHECK(heuristic_width(100000) == 32);  // 100000^0.3 ~ 31.6
  CHECK(heuristic_width(1) == 1);
  CHECK(heuristic_width(1024) == 8);  // 1024^0.3 ~ 8.0
  CHECK(heuristic_width(20000) == 16);
}

TEST_CASE("width rule steps exactly at a power-of-two midpoint") {
  // 392^0.3 is just under 6, 393^0.3 just over: the rounded width jumps
  // from 4 to 8 across this boundary.
  CHECK(heuristic_width(392) == 4);
  CHECK(heuristic_width(393) == 8);
}

}  // TEST_SUITE
