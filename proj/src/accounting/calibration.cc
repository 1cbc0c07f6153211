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

#include "selpt/accounting/calibration.h"

#include <cmath>
#include <limits>
#include <vector>

#include "absl/strings/str_cat.h"
#include "selpt/accounting/prv_accountant.h"
#include "selpt/common/status_macros.h"

namespace selpt::accounting {
namespace {

// True when the candidate multiplier meets the target. An unachievable
// epsilon (too much mass at infinite loss) counts as not meeting it.
absl::StatusOr<bool> Meets(const PrivacyBudget& target,
                           std::span<const MechanismSpec> fixed_stages,
                           double sampling_rate, int64_t steps, double sigma,
                           const PldOptions& pld) {
  std::vector<MechanismSpec> stages(fixed_stages.begin(), fixed_stages.end());
  stages.push_back(MechanismSpec{sigma, sampling_rate, steps});
  absl::StatusOr<double> epsilon = PrvEpsilonForStages(stages, target.delta, pld);
  if (absl::IsOutOfRange(epsilon.status())) return false;
  if (!epsilon.ok()) return epsilon.status();
  return *epsilon <= target.epsilon;
}

}  // namespace

absl::StatusOr<double> CalibrateNoiseAfterStages(
    const PrivacyBudget& target, std::span<const MechanismSpec> fixed_stages,
    double sampling_rate, int64_t steps, const CalibrationOptions& options) {
  RETURN_IF_ERROR(target.Validate());
  if (target.delta <= 0) {
    return absl::InvalidArgumentError("calibration needs a positive delta");
  }
  RETURN_IF_ERROR((MechanismSpec{1.0, sampling_rate, steps}.Validate()));
  if (!(options.min_noise_multiplier > 0) ||
      !(options.max_noise_multiplier > options.min_noise_multiplier) ||
      !(options.relative_tolerance > 0)) {
    return absl::InvalidArgumentError("invalid calibration bracket");
  }

  double lo = options.min_noise_multiplier;
  double hi = options.max_noise_multiplier;
  ASSIGN_OR_RETURN(bool hi_ok, Meets(target, fixed_stages, sampling_rate,
                                     steps, hi, options.pld));
  if (!hi_ok) {
    return absl::OutOfRangeError(absl::StrCat(
        "unachievable within bracket: (", target.epsilon, ", ", target.delta,
        ") not met even at noise multiplier ", hi));
  }
  ASSIGN_OR_RETURN(bool lo_ok, Meets(target, fixed_stages, sampling_rate,
                                     steps, lo, options.pld));
  if (lo_ok) {
    return absl::FailedPreconditionError(absl::StrCat(
        "target already met at the lower bracket noise multiplier ", lo));
  }
  while (hi / lo - 1.0 > options.relative_tolerance) {
    const double mid = std::sqrt(lo * hi);
    ASSIGN_OR_RETURN(bool ok, Meets(target, fixed_stages, sampling_rate, steps,
                                    mid, options.pld));
    (ok ? hi : lo) = mid;
  }
  return hi;
}

absl::StatusOr<double> CalibrateNoise(const PrivacyBudget& target,
                                      double sampling_rate, int64_t steps,
                                      const CalibrationOptions& options) {
  return CalibrateNoiseAfterStages(target, {}, sampling_rate, steps, options);
}

}  // namespace selpt::accounting
