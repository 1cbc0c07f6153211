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


#ifndef SELPT_COMMON_THREADS_H_
#define SELPT_COMMON_THREADS_H_

#include <cstddef>
#include <functional>

namespace selpt {

// Worker count: SELPT_NUM_THREADS if set to a positive integer, else the
// hardware concurrency (at least 1).
int WorkerThreads();

// Splits [0, n) into at most `threads` contiguous shards and runs
// fn(shard, begin, end) on each. Shard boundaries depend only on n and
// threads. Runs inline when threads <= 1.
void ParallelShards(size_t n, int threads,
                    const std::function<void(size_t, size_t, size_t)>& fn);

// Number of shards ParallelShards will use.
size_t ShardCount(size_t n, int threads);

}  // namespace selpt

#endif  // SELPT_COMMON_THREADS_H_
