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


#include "selpt/dp/dp_optimizer.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "selpt/common/random.h"
#include "selpt/common/status_macros.h"

namespace selpt::dp {
absl::Status DpSgdConfig::Validate() const {
  if (!(clip_norm > 0)) {
    return absl::InvalidArgumentError("clip_norm must be positive");
  }
  if (!(noise_multiplier >= 0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(
        "noise_multiplier must be finite and nonnegative");
  }
  if (noise_multiplier > 0 && std::isinf(clip_norm)) {
    return absl::InvalidArgumentError(
        "an unbounded clip_norm needs noise_multiplier 0");
  }
  if (!(expected_batch_size > 0) || !std::isfinite(expected_batch_size)) {
    return absl::InvalidArgumentError("expected_batch_size must be positive");
  }
  return absl::OkStatus();
}

double ClipFactor(double norm, double clip_norm) {
  if (norm <= clip_norm) return 1.0;
  return clip_norm / norm;
}

double L2Norm(std::span<const double> v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double ss = 0.0;
  for (double x : v) {
    const double y = x / scale;
    ss += y * y;
  }
  return scale * std::sqrt(ss);
}

absl::StatusOr<GradientBatch> ClipPerExample(const GradientBatch& batch,
                                             double clip_norm) {
  if (!(clip_norm > 0)) {
    return absl::InvalidArgumentError("clip_norm must be positive");
  }
  RETURN_IF_ERROR(batch.Validate());
  GradientBatch out = batch;
  for (size_t i = 0; i < out.batch_size(); ++i) {
    std::span<double> g = out.mutable_example(i);
    const double factor = ClipFactor(L2Norm(g), clip_norm);
    if (factor == 1.0) continue;
    for (double& x : g) x *= factor;
  }
  return out;
}

void PairwiseAccumulator::Add(std::span<const double> v, double scale) {
  std::vector<double> carry(v.begin(), v.end());
  if (scale != 1.0) {
    for (double& x : carry) x *= scale;
  }
  for (size_t level = 0;; ++level) {
    if (level == levels_.size()) levels_.emplace_back();
    if (levels_[level].empty()) {
      levels_[level] = std::move(carry);
      break;
    }
    std::vector<double>& older = levels_[level];
    for (size_t j = 0; j < dim_; ++j) carry[j] = older[j] + carry[j];
    older = {};
  }
  ++count_;
}

std::vector<double> PairwiseAccumulator::Sum() && {
  std::vector<double> out(dim_, 0.0);
  for (size_t level = levels_.size(); level-- > 0;) {
    if (levels_[level].empty()) continue;
    for (size_t j = 0; j < dim_; ++j) out[j] += levels_[level][j];
  }
  return out;
}

std::vector<double> PairwiseSum(const GradientBatch& batch) {
  PairwiseAccumulator acc(batch.dim());
  for (size_t i = 0; i < batch.batch_size(); ++i) acc.Add(batch.example(i));
  return std::move(acc).Sum();
}

absl::StatusOr<std::vector<double>> AddNoiseAndNormalize(
    std::vector<double> clipped_sum, const DpSgdConfig& config,
    uint64_t rng_seed) {
  RETURN_IF_ERROR(config.Validate());
  const double stddev = config.noise_multiplier * config.clip_norm;
  if (stddev > 0) {
    CounterRng rng(rng_seed);
    for (double& x : clipped_sum) x += stddev * rng.NextGaussian();
  }
  for (double& x : clipped_sum) x /= config.expected_batch_size;
  return clipped_sum;
}

absl::StatusOr<std::vector<double>> Privatize(const GradientBatch& batch,
                                              const DpSgdConfig& config,
                                              uint64_t rng_seed) {
  RETURN_IF_ERROR(config.Validate());
  ASSIGN_OR_RETURN(GradientBatch clipped,
                   ClipPerExample(batch, config.clip_norm));
  return AddNoiseAndNormalize(PairwiseSum(clipped), config, rng_seed);
}

}  // namespace selpt::dp
