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

#include "selpt/accounting/privacy_report.h"

#include <vector>

#include "selpt/accounting/prv_accountant.h"
#include "selpt/accounting/rdp_accountant.h"
#include "selpt/common/status_macros.h"

namespace selpt::accounting {

absl::StatusOr<StageAccount> AccountStage(std::string name,
                                          const MechanismSpec& mechanism,
                                          double delta,
                                          const PldOptions& options) {
  ASSIGN_OR_RETURN(double epsilon, PrvEpsilon(mechanism, delta, options));
  ASSIGN_OR_RETURN(double rdp, RdpEpsilon(mechanism, delta));
  StageAccount stage;
  stage.name = std::move(name);
  stage.mechanism = mechanism;
  stage.budget = {epsilon, delta};
  stage.rdp_epsilon = rdp;
  return stage;
}

StageAccount FreeStage(std::string name) {
  StageAccount stage;
  stage.name = std::move(name);
  return stage;
}

absl::StatusOr<PrivacyReport> ComposeReport(StageAccount selection,
                                            StageAccount finetune,
                                            double delta_slack,
                                            const PldOptions& options) {
  PrivacyReport report;
  CompositionInput input{selection.budget, finetune.budget, delta_slack};
  ASSIGN_OR_RETURN(report.total, AdvancedCompose(input, &report.rule));

  std::vector<MechanismSpec> stages;
  if (selection.mechanism.has_value()) stages.push_back(*selection.mechanism);
  if (finetune.mechanism.has_value()) stages.push_back(*finetune.mechanism);
  if (!stages.empty()) {
    absl::StatusOr<double> joint =
        PrvEpsilonForStages(stages, report.total.delta, options);
    if (joint.ok()) {
      report.joint_prv_epsilon = *joint;
    } else if (!absl::IsOutOfRange(joint.status())) {
      return joint.status();
    }
  } else {
    report.joint_prv_epsilon = 0.0;
  }
  report.selection = std::move(selection);
  report.finetune = std::move(finetune);
  report.delta_slack = delta_slack;
  return report;
}

nlohmann::json ToJson(const MechanismSpec& spec) {
  return {{"noise_multiplier", spec.noise_multiplier},
          {"sampling_rate", spec.sampling_rate},
          {"steps", spec.steps}};
}

nlohmann::json ToJson(const PrivacyBudget& budget) {
  return {{"epsilon", budget.epsilon}, {"delta", budget.delta}};
}

namespace {

nlohmann::json StageJson(const StageAccount& stage) {
  nlohmann::json j;
  j["name"] = stage.name;
  j["mechanism"] =
      stage.mechanism.has_value() ? ToJson(*stage.mechanism) : nlohmann::json();
  j["budget"] = ToJson(stage.budget);
  j["prv_epsilon"] = stage.budget.epsilon;
  j["rdp_epsilon"] = stage.rdp_epsilon.has_value()
                         ? nlohmann::json(*stage.rdp_epsilon)
                         : nlohmann::json();
  return j;
}

}  // namespace

nlohmann::json ToJson(const PrivacyReport& report) {
  nlohmann::json j;
  j["accountant"] = "prv";
  j["cross_check"] = "rdp";
  j["stages"] = {StageJson(report.selection), StageJson(report.finetune)};
  j["delta_slack"] = report.delta_slack;
  j["composition_rule"] = std::string(CompositionRuleName(report.rule));
  j["total"] = ToJson(report.total);
  if (report.joint_prv_epsilon.has_value()) {
    j["joint_prv"] = {{"epsilon", *report.joint_prv_epsilon},
                      {"delta", report.total.delta}};
    j["tighter"] = *report.joint_prv_epsilon < report.total.epsilon
                       ? "joint_prv"
                       : "composition_theorem";
  } else {
    j["joint_prv"] = nullptr;
    j["tighter"] = "composition_theorem";
  }
  return j;
}

}  // namespace selpt::accounting
