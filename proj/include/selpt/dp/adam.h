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


// Bias-corrected Adam with decoupled weight decay.

#ifndef SELPT_DP_ADAM_H_
#define SELPT_DP_ADAM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace selpt::dp {

struct AdamHyperparameters {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_stability = 1e-8;
  double weight_decay = 0.0;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  int64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_stability = 1e-8;
  // Callers running a schedule overwrite this before each step.
  double learning_rate = 1e-3;
  double weight_decay = 0.0;

  static absl::StatusOr<AdamState> Create(size_t dim,
                                          const AdamHyperparameters& hp);
  absl::Status Validate() const;
};

// Advances `state` by one step and returns the parameter delta
//   -lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * params).
// `params` may be empty when weight_decay is 0.
absl::StatusOr<std::vector<double>> AdamStep(AdamState& state,
                                             std::span<const double> gradient,
                                             std::span<const double> params);

// AdamStep followed by params += delta.
absl::Status ApplyAdam(AdamState& state, std::span<const double> gradient,
                       std::span<double> params);

}  // namespace selpt::dp

#endif  // SELPT_DP_ADAM_H_
