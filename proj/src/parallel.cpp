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

#include "delkm/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace delkm {

namespace {
unsigned g_max_threads = 1;
}

void set_max_threads(unsigned n) { g_max_threads = n == 0 ? 1 : n; }
unsigned max_threads() { return g_max_threads; }

void run_blocks(std::size_t blocks, const std::function<void(std::size_t)>& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(g_max_threads, blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) body(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= blocks) return;
        body(b);
      }
    });
  }
  for (auto& t : pool) t.join();
}

BlockRange block_range(std::size_t n, std::size_t blocks, std::size_t block) {
  const std::size_t base = n / blocks;
  const std::size_t extra = n % blocks;
  const std::size_t begin = block * base + std::min(block, extra);
  const std::size_t len = base + (block < extra ? 1 : 0);
  return {begin, begin + len};
}

}  // namespace delkm
