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

#include "selpt/common/random.h"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "selpt/common/text.h"

namespace selpt {

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t SubSeed(uint64_t seed, std::string_view label) {
  return Mix64(seed ^ Mix64(Fnv1a64(label)));
}

uint64_t SubSeed(uint64_t seed, uint64_t index) {
  return Mix64(Mix64(seed) + Mix64(index ^ 0x5851f42d4c957f2dULL));
}

uint64_t CounterRng::NextU64() {
  // Two rounds so that nearby keys do not produce correlated streams.
  return Mix64(Mix64(key_ + 0x9e3779b97f4a7c15ULL * (counter_++)) ^ key_);
}

double CounterRng::NextUniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double CounterRng::NextUniformOpenZero() {
  return (static_cast<double>(NextU64() >> 11) + 1.0) * 0x1.0p-53;
}

uint64_t CounterRng::NextBelow(uint64_t bound) {
  // Lemire's multiply-shift with rejection; exact for every bound.
  uint64_t x = NextU64();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  uint64_t low = static_cast<uint64_t>(m);
  if (low < bound) {
    const uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = NextU64();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

double CounterRng::NextGaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = NextUniformOpenZero();
  const double u2 = NextUniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<size_t> PoissonSample(size_t n, double rate, CounterRng& rng) {
  std::vector<size_t> out;
  out.reserve(static_cast<size_t>(rate * static_cast<double>(n) * 1.2) + 4);
  for (size_t i = 0; i < n; ++i) {
    if (rng.NextUniform() < rate) out.push_back(i);
  }
  return out;
}

std::vector<size_t> SampleWithoutReplacement(size_t n, size_t count,
                                             CounterRng& rng) {
  // Partial Fisher-Yates over a sparse permutation so memory is O(count).
  std::unordered_map<size_t, size_t> swapped;
  std::vector<size_t> out;
  out.reserve(count);
  auto at = [&swapped](size_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  for (size_t i = 0; i < count && i < n; ++i) {
    const size_t j = i + static_cast<size_t>(rng.NextBelow(n - i));
    const size_t vi = at(i);
    const size_t vj = at(j);
    swapped[j] = vi;
    swapped[i] = vj;
    out.push_back(vj);
  }
  return out;
}

}  // namespace selpt
