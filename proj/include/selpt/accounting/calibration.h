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

#ifndef SELPT_ACCOUNTING_CALIBRATION_H_
#define SELPT_ACCOUNTING_CALIBRATION_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "selpt/accounting/privacy_budget.h"
#include "selpt/accounting/privacy_loss_distribution.h"

namespace selpt::accounting {

struct CalibrationOptions {
  double min_noise_multiplier = 0.3;
  double max_noise_multiplier = 100.0;
  // Bisection stops once hi / lo - 1 <= this.
  double relative_tolerance = 1e-3;
  PldOptions pld;
};

// Smallest noise multiplier (to the relative tolerance) for which `steps`
// Poisson-subsampled Gaussian steps at `sampling_rate` satisfy `target`
// under the PLD accountant. Errors:
//   OutOfRange          target not met even at the largest multiplier;
//   FailedPrecondition  target already met at the smallest multiplier, so the
//                       answer lies below the bracket.
absl::StatusOr<double> CalibrateNoise(const PrivacyBudget& target,
                                      double sampling_rate, int64_t steps,
                                      const CalibrationOptions& options = {});

// As CalibrateNoise, but the calibrated stage is jointly composed (PLD
// convolution) with already-fixed stages before reading off epsilon.
absl::StatusOr<double> CalibrateNoiseAfterStages(
    const PrivacyBudget& target, std::span<const MechanismSpec> fixed_stages,
    double sampling_rate, int64_t steps,
    const CalibrationOptions& options = {});

}  // namespace selpt::accounting

#endif  // SELPT_ACCOUNTING_CALIBRATION_H_
