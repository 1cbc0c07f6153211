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

#include "selpt/accounting/privacy_budget.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "selpt/common/status_macros.h"

namespace selpt::accounting {

absl::Status PrivacyBudget::Validate() const {
  if (!std::isfinite(epsilon) || epsilon < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and non-negative, got ", epsilon));
  }
  if (!std::isfinite(delta) || delta < 0 || delta >= 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1), got ", delta));
  }
  return absl::OkStatus();
}

absl::Status MechanismSpec::Validate() const {
  if (!std::isfinite(noise_multiplier) || noise_multiplier <= 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise_multiplier must be positive, got ", noise_multiplier));
  }
  if (!std::isfinite(sampling_rate) || sampling_rate <= 0 ||
      sampling_rate > 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling_rate must lie in (0, 1], got ", sampling_rate));
  }
  if (steps < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("steps must be at least 1, got ", steps));
  }
  return absl::OkStatus();
}

absl::Status CompositionInput::Validate() const {
  RETURN_IF_ERROR(stage1.Validate());
  RETURN_IF_ERROR(stage2.Validate());
  if (!std::isfinite(delta_slack) || delta_slack <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta_slack must be positive, got ", delta_slack));
  }
  if (stage1.delta + stage2.delta + delta_slack >= 1) {
    return absl::InvalidArgumentError("composed delta must stay below 1");
  }
  return absl::OkStatus();
}

std::string_view CompositionRuleName(CompositionRule rule) {
  return rule == CompositionRule::kBasic ? "basic" : "advanced";
}

absl::StatusOr<PrivacyBudget> AdvancedCompose(const CompositionInput& input,
                                              CompositionRule* rule) {
  RETURN_IF_ERROR(input.Validate());
  const double e1 = input.stage1.epsilon;
  const double e2 = input.stage2.epsilon;
  const double basic = e1 + e2;
  const double squares = e1 * e1 + e2 * e2;
  const double advanced =
      0.5 * squares +
      std::sqrt(2.0 * std::log(1.0 / input.delta_slack) * squares);
  PrivacyBudget out;
  out.delta = input.stage1.delta + input.stage2.delta + input.delta_slack;
  if (advanced < basic) {
    out.epsilon = advanced;
    if (rule != nullptr) *rule = CompositionRule::kAdvanced;
  } else {
    out.epsilon = basic;
    if (rule != nullptr) *rule = CompositionRule::kBasic;
  }
  return out;
}

double MaxSecondStageEpsilon(double total_epsilon, double stage1_epsilon,
                             double delta_slack) {
  const double basic = std::max(0.0, total_epsilon - stage1_epsilon);
  // Solve s/2 + sqrt(2 L s) = total for s = e1^2 + e2^2.
  const double two_l = 2.0 * std::log(1.0 / delta_slack);
  const double root = std::sqrt(two_l + 2.0 * total_epsilon) - std::sqrt(two_l);
  const double s = root * root;
  const double advanced =
      s > stage1_epsilon * stage1_epsilon
          ? std::sqrt(s - stage1_epsilon * stage1_epsilon)
          : 0.0;
  double e2 = std::max(basic, advanced);
  // The closed forms can land an ulp or two over the total.
  auto composed = [&](double x) {
    const double squares = stage1_epsilon * stage1_epsilon + x * x;
    return std::min(stage1_epsilon + x,
                    0.5 * squares + std::sqrt(two_l * squares));
  };
  while (e2 > 0 && composed(e2) > total_epsilon) {
    e2 = std::nextafter(e2, 0.0);
  }
  return e2;
}

int64_t StepsForEpochs(double epochs, double sampling_rate) {
  // Guard against 30 / 0.03 landing a hair above 1000.
  const double raw = epochs / sampling_rate;
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) <= 1e-9 * std::max(1.0, raw)) {
    return static_cast<int64_t>(rounded);
  }
  return static_cast<int64_t>(std::ceil(raw));
}

}  // namespace selpt::accounting
