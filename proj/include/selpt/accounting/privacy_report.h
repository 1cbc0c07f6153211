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

#ifndef SELPT_ACCOUNTING_PRIVACY_REPORT_H_
#define SELPT_ACCOUNTING_PRIVACY_REPORT_H_

#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "selpt/accounting/privacy_budget.h"
#include "selpt/accounting/privacy_loss_distribution.h"

namespace selpt::accounting {

// Accounting of one private stage. A stage without a mechanism (e.g. the
// selection stage of a run that selects at random) costs (0, 0).
struct StageAccount {
  std::string name;
  std::optional<MechanismSpec> mechanism;
  PrivacyBudget budget;             // PLD accountant, at budget.delta
  std::optional<double> rdp_epsilon;  // cross-check at the same delta
};

absl::StatusOr<StageAccount> AccountStage(std::string name,
                                          const MechanismSpec& mechanism,
                                          double delta,
                                          const PldOptions& options = {});
StageAccount FreeStage(std::string name);

struct PrivacyReport {
  StageAccount selection;
  StageAccount finetune;
  double delta_slack = 0.0;
  CompositionRule rule = CompositionRule::kBasic;
  // advanced_compose(selection.budget, finetune.budget, delta_slack).
  PrivacyBudget total;
  // Joint PLD composition of both stages, evaluated at total.delta.
  std::optional<double> joint_prv_epsilon;
};

absl::StatusOr<PrivacyReport> ComposeReport(StageAccount selection,
                                            StageAccount finetune,
                                            double delta_slack,
                                            const PldOptions& options = {});

nlohmann::json ToJson(const MechanismSpec& spec);
nlohmann::json ToJson(const PrivacyBudget& budget);
nlohmann::json ToJson(const PrivacyReport& report);

}  // namespace selpt::accounting

#endif  // SELPT_ACCOUNTING_PRIVACY_REPORT_H_
