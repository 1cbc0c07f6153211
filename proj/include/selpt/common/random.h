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

// Seeded randomness that produces the same streams on every platform.
//
// The standard library's distributions are implementation defined, so the
// uniform, Gaussian and shuffle helpers here are built directly on a
// counter-based generator: the n-th output is a pure function of (key, n).

#ifndef SELPT_COMMON_RANDOM_H_
#define SELPT_COMMON_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace selpt {

// SplitMix64 finalizer. Bijective on 64-bit words.
uint64_t Mix64(uint64_t x);

// Derives an independent seed for a labeled purpose ("dp-noise", "lm-init").
uint64_t SubSeed(uint64_t seed, std::string_view label);
// Derives an independent seed for an indexed purpose (step number, trial).
uint64_t SubSeed(uint64_t seed, uint64_t index);

class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : key_(key) {}

  uint64_t NextU64();
  // Uniform in [0, 1) with 53 random bits.
  double NextUniform();
  // Uniform in (0, 1]; safe to take the logarithm of.
  double NextUniformOpenZero();
  // Uniform integer in [0, bound); bound must be positive.
  uint64_t NextBelow(uint64_t bound);
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double NextGaussian();

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates shuffle driven by `rng`.
template <typename T>
void Shuffle(std::vector<T>& items, CounterRng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.NextBelow(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Returns the indices {i : U_i < rate} for n independent Bernoulli draws.
std::vector<size_t> PoissonSample(size_t n, double rate, CounterRng& rng);

// Returns `count` distinct indices from [0, n), uniformly, in draw order.
std::vector<size_t> SampleWithoutReplacement(size_t n, size_t count,
                                             CounterRng& rng);

}  // namespace selpt

#endif  // SELPT_COMMON_RANDOM_H_
