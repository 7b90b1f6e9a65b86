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

#pragma once

#include <cstdint>
#include <random>

namespace delkm {

/// splitmix64 finalizer. Used for seed derivation only, never as a generator.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic combination of a parent seed with a tag. Derived seeds are
/// treated as independent streams (retrains, replicates, per-node solvers).
std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t tag);
std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t tag_a, std::uint64_t tag_b);

/// Seeded random stream with fully specified output:
///   - engine: std::mt19937_64 (bit-stable across platforms)
///   - uniform doubles: top 53 bits of the engine output, so uniform01() is
///     in [0, 1) with 2^-53 resolution
///   - bounded integers: rejection sampling (unbiased)
///   - normal variates: Box-Muller transform (trigonometric form) over two
///     uniform draws; the second variate of each pair is cached
/// Keeping every draw explicit (instead of std::*_distribution, whose output
/// is implementation-defined) makes replay tests and cross-platform runs of
/// the same binary reproducible.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_below(std::size_t n);

  /// Standard normal variate.
  double gaussian();

  /// Independent stream derived from this stream's seed (not its position).
  RngStream derive(std::uint64_t tag) const { return RngStream(mix_seed(seed_, tag)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace delkm
