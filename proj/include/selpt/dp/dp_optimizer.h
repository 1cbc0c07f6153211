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


// Per-example gradient clipping and the Gaussian mechanism on their sum.
//
// The privatized gradient is always divided by the *expected* batch size,
// never by the number of examples actually drawn. The accountant models each
// step as a Poisson-subsampled Gaussian with sensitivity C on the sum, which
// only holds when the denominator is a public constant.

#ifndef SELPT_DP_DP_OPTIMIZER_H_
#define SELPT_DP_DP_OPTIMIZER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace selpt::dp {

// Row-major stack of equal-length per-example gradients.
class GradientBatch {
 public:
  // An empty batch of dimension `dim`; rows are added with AddExample.
  explicit GradientBatch(size_t dim) : dim_(dim) {}

  // Fails on ragged input, an empty list, or non-finite entries.
  static absl::StatusOr<GradientBatch> FromVectors(
      const std::vector<std::vector<double>>& per_example);

  // Fails on dimension mismatch or non-finite entries.
  absl::Status AddExample(std::span<const double> gradient);

  size_t dim() const { return dim_; }
  size_t batch_size() const { return rows_; }
  std::span<const double> example(size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> mutable_example(size_t i) {
    return {data_.data() + i * dim_, dim_};
  }

  absl::Status Validate() const;

 private:
  size_t dim_;
  size_t rows_ = 0;
  std::vector<double> data_;
};

struct DpSgdConfig {
  double clip_norm = 1.0;  // may be +inf when noise_multiplier is 0
  double noise_multiplier = 0.0;
  double expected_batch_size = 1.0;

  absl::Status Validate() const;
};

// Scale factor min(1, clip_norm / norm), with norm 0 mapping to 1.
double ClipFactor(double norm, double clip_norm);

// Euclidean norm; overflow safe for large entries.
double L2Norm(std::span<const double> v);

absl::StatusOr<GradientBatch> ClipPerExample(const GradientBatch& batch,
                                             double clip_norm);

// Streaming pairwise summation: a binary counter of partial sums, so the
// bracketing depends only on how many vectors were added. Holds at most
// log2(n) + 1 partial sums.
class PairwiseAccumulator {
 public:
  explicit PairwiseAccumulator(size_t dim) : dim_(dim) {}

  // Adds scale * v. v must have dimension dim().
  void Add(std::span<const double> v, double scale = 1.0);
  size_t count() const { return count_; }
  size_t dim() const { return dim_; }
  std::vector<double> Sum() &&;

 private:
  size_t dim_;
  size_t count_ = 0;
  std::vector<std::vector<double>> levels_;  // empty vector = free slot
};

// Column sums of the batch through PairwiseAccumulator.
std::vector<double> PairwiseSum(const GradientBatch& batch);

// (sum + N(0, (sigma C)^2 I)) / expected_batch_size. `clipped_sum` must
// already be a sum of clipped gradients; it may come from an empty draw.
absl::StatusOr<std::vector<double>> AddNoiseAndNormalize(
    std::vector<double> clipped_sum, const DpSgdConfig& config,
    uint64_t rng_seed);

// Clips, sums and privatizes a batch.
absl::StatusOr<std::vector<double>> Privatize(const GradientBatch& batch,
                                              const DpSgdConfig& config,
                                              uint64_t rng_seed);

}  // namespace selpt::dp

#endif  // SELPT_DP_DP_OPTIMIZER_H_
