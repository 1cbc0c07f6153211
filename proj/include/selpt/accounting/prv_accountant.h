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

#ifndef SELPT_ACCOUNTING_PRV_ACCOUNTANT_H_
#define SELPT_ACCOUNTING_PRV_ACCOUNTANT_H_

#include <span>

#include "absl/status/statusor.h"
#include "selpt/accounting/privacy_budget.h"
#include "selpt/accounting/privacy_loss_distribution.h"

namespace selpt::accounting {

// Numerical (PLD) accountant for DP-SGD stages. Both adjacency directions
// are composed and the larger epsilon is reported.
absl::StatusOr<double> PrvEpsilon(const MechanismSpec& spec, double delta,
                                  const PldOptions& options = {});

// Epsilon of the joint composition of several stages (each a self-composed
// subsampled Gaussian), again maximized over adjacency directions.
absl::StatusOr<double> PrvEpsilonForStages(std::span<const MechanismSpec> stages,
                                           double delta,
                                           const PldOptions& options = {});

// The composed PLD of one stage in one direction.
absl::StatusOr<PrivacyLossDistribution> StagePld(const MechanismSpec& spec,
                                                 Adjacency adjacency,
                                                 const PldOptions& options = {});

}  // namespace selpt::accounting

#endif  // SELPT_ACCOUNTING_PRV_ACCOUNTANT_H_
