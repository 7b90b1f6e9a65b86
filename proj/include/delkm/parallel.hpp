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

#include <cstddef>
#include <functional>

namespace delkm {

/// Worker-thread cap for the internally parallelizable loops (assignment,
/// silhouette). 1 = single-threaded, the default. Results are deterministic
/// for any setting: work is split into fixed index blocks whose partial
/// results are combined in block order regardless of the thread count.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs body(block_index) for block_index in [0, blocks), possibly on worker
/// threads. Bodies must only touch state owned by their block.
void run_blocks(std::size_t blocks, const std::function<void(std::size_t)>& body);

/// Half-open item range of a block when n items are split into `blocks`
/// nearly equal parts.
struct BlockRange {
  std::size_t begin;
  std::size_t end;
};
BlockRange block_range(std::size_t n, std::size_t blocks, std::size_t block);

}  // namespace delkm
