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

#include "selpt/accounting/prv_accountant.h"

#include <algorithm>
#include <optional>

#include "selpt/common/status_macros.h"

namespace selpt::accounting {

absl::StatusOr<PrivacyLossDistribution> StagePld(const MechanismSpec& spec,
                                                 Adjacency adjacency,
                                                 const PldOptions& options) {
  RETURN_IF_ERROR(spec.Validate());
  ASSIGN_OR_RETURN(PrivacyLossDistribution step,
                   PldForSubsampledGaussian(spec.noise_multiplier,
                                            spec.sampling_rate, options,
                                            adjacency));
  return ComposePld(step, spec.steps);
}

absl::StatusOr<double> PrvEpsilon(const MechanismSpec& spec, double delta,
                                  const PldOptions& options) {
  return PrvEpsilonForStages(std::span<const MechanismSpec>(&spec, 1), delta,
                             options);
}

absl::StatusOr<double> PrvEpsilonForStages(std::span<const MechanismSpec> stages,
                                           double delta,
                                           const PldOptions& options) {
  if (stages.empty()) {
    return absl::InvalidArgumentError("at least one stage is required");
  }
  bool all_unsampled = true;
  for (const MechanismSpec& s : stages) {
    RETURN_IF_ERROR(s.Validate());
    all_unsampled = all_unsampled && s.sampling_rate == 1.0;
  }
  // Without subsampling both directions give the same Gaussian PLD.
  std::vector<Adjacency> directions = {Adjacency::kRemove};
  if (!all_unsampled) directions.push_back(Adjacency::kAdd);

  double worst = 0.0;
  for (Adjacency adjacency : directions) {
    std::optional<PrivacyLossDistribution> joint;
    for (const MechanismSpec& s : stages) {
      ASSIGN_OR_RETURN(PrivacyLossDistribution stage,
                       StagePld(s, adjacency, options));
      if (joint.has_value()) {
        ASSIGN_OR_RETURN(joint, ComposePair(*joint, stage));
      } else {
        joint = std::move(stage);
      }
    }
    ASSIGN_OR_RETURN(double epsilon, EpsilonAtDelta(*joint, delta));
    worst = std::max(worst, epsilon);
  }
  return worst;
}

}  // namespace selpt::accounting
