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

#ifndef SELPT_ACCOUNTING_PRIVACY_BUDGET_H_
#define SELPT_ACCOUNTING_PRIVACY_BUDGET_H_

#include <cstdint>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace selpt::accounting {

// An (epsilon, delta) guarantee for neighbouring datasets that differ by the
// addition or removal of one example.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  // epsilon finite and >= 0, delta in [0, 1).
  absl::Status Validate() const;
};

// One DP-SGD style stage: `steps` compositions of a Gaussian mechanism with
// noise std `noise_multiplier` (relative to sensitivity 1), each applied to a
// Poisson subsample drawn with probability `sampling_rate`.
struct MechanismSpec {
  double noise_multiplier = 1.0;
  double sampling_rate = 1.0;
  int64_t steps = 1;

  absl::Status Validate() const;
};

struct CompositionInput {
  PrivacyBudget stage1;
  PrivacyBudget stage2;
  // delta' in the advanced composition bound; must be positive.
  double delta_slack = 0.0;

  absl::Status Validate() const;
};

enum class CompositionRule { kBasic, kAdvanced };

std::string_view CompositionRuleName(CompositionRule rule);

// Two-stage adaptive composition:
//   eps   = min(e1 + e2, (e1^2 + e2^2) / 2 + sqrt(2 ln(1/delta') (e1^2 + e2^2)))
//   delta = d1 + d2 + delta'
// `rule`, when given, receives the branch of the min that was taken (ties go
// to kBasic).
absl::StatusOr<PrivacyBudget> AdvancedCompose(const CompositionInput& input,
                                              CompositionRule* rule = nullptr);

// Largest stage-2 epsilon whose composition with `stage1_epsilon` stays within
// `total_epsilon` (under whichever branch allows more). Zero when stage 1
// alone exhausts the budget.
double MaxSecondStageEpsilon(double total_epsilon, double stage1_epsilon,
                             double delta_slack);

// DP-SGD step count for a number of epochs at Poisson rate q: ceil(epochs/q).
int64_t StepsForEpochs(double epochs, double sampling_rate);

}  // namespace selpt::accounting

#endif  // SELPT_ACCOUNTING_PRIVACY_BUDGET_H_
