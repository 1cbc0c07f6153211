// Copyright 2026 The Selective Pre-training Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "selpt/common/threads.h"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace selpt {

int WorkerThreads() {
  if (const char* env = std::getenv("SELPT_NUM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

size_t ShardCount(size_t n, int threads) {
  if (n == 0) return 0;
  return std::min(n, static_cast<size_t>(std::max(1, threads)));
}

void ParallelShards(size_t n, int threads,
                    const std::function<void(size_t, size_t, size_t)>& fn) {
  const size_t shards = ShardCount(n, threads);
  if (shards == 0) return;
  auto bounds = [&](size_t s) { return n * s / shards; };
  if (shards == 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(shards);
  for (size_t s = 0; s < shards; ++s) {
    workers.emplace_back(fn, s, bounds(s), bounds(s + 1));
  }
  for (std::thread& t : workers) t.join();
}

}  // namespace selpt
