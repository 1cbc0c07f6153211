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


// Pipeline configuration: an INI file with sections [paths], [privacy],
// [selection], [classifier], [lm] and [run].

#ifndef SELPT_PIPELINE_CONFIG_H_
#define SELPT_PIPELINE_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "selpt/accounting/privacy_budget.h"
#include "selpt/classifier/dp_training.h"
#include "selpt/classifier/featurizer.h"
#include "selpt/lm/toy_lm.h"
#include "selpt/lm/training.h"

namespace selpt::pipeline {

enum class Mode { kSelective, kRandom, kFullSource, kNoPretrain };

std::string_view ModeName(Mode mode);
absl::StatusOr<Mode> ParseMode(std::string_view name);

struct PipelineConfig {
  // [paths]
  std::string target_train_path;
  std::string target_test_path;
  std::string source_path;
  std::string output_dir;

  // [privacy]
  accounting::PrivacyBudget total = {7.3, 1e-7};
  double split = 0.1;  // share of epsilon given to selection
  double delta_selection = 2.5e-8;
  double delta_finetune = 2.5e-8;
  double delta_slack = 5e-8;

  // [selection] exactly one of the two budgets is set.
  int64_t token_budget = 0;
  double token_budget_fraction = 0.0;
  int diagnostics_k = 100;

  // [classifier]
  classifier::FeatureConfig features;
  classifier::ClassifierTrainConfig classifier;

  // [lm]
  int max_vocab = 8192;
  int min_count = 1;
  lm::ToyLmConfig lm_shape;  // vocab_size is filled in at run time
  lm::PretrainSchedule pretrain;
  lm::FinetuneConfig finetune;

  // [run]
  Mode mode = Mode::kSelective;
  uint64_t seed = 0;
  int threads = 0;  // 0: SELPT_NUM_THREADS or hardware concurrency
};

// Unknown sections or keys are errors. Deltas left out default to 1/4, 1/4
// and 1/2 of the total delta.
absl::StatusOr<PipelineConfig> ParseConfig(std::string_view ini_text);
absl::StatusOr<PipelineConfig> LoadConfig(const std::string& path);

std::string ConfigToIni(const PipelineConfig& config);
nlohmann::json ConfigToJson(const PipelineConfig& config);
// FNV-1a of the canonical JSON, as 16 hex digits.
std::string ConfigHash(const PipelineConfig& config);

struct Finding {
  enum class Severity { kError, kWarning };
  Severity severity;
  std::string key;
  std::string message;
};

// Schema, path and budget-arithmetic checks. No side effects.
std::vector<Finding> ValidateConfig(const PipelineConfig& config,
                                    bool check_paths = true);
bool HasErrors(const std::vector<Finding>& findings);
std::string FormatFinding(const Finding& finding);

// Stage allocations before any data is touched. Selective mode gives
// selection split * epsilon at delta_selection and fine-tuning the largest
// epsilon that still composes to the total. Other modes spend nothing on
// selection and give fine-tuning the whole epsilon.
struct BudgetPlan {
  accounting::PrivacyBudget selection;
  accounting::PrivacyBudget finetune;
  double delta_slack = 0.0;
};

absl::StatusOr<BudgetPlan> PlanBudgets(const PipelineConfig& config);

}  // namespace selpt::pipeline

#endif  // SELPT_PIPELINE_CONFIG_H_
