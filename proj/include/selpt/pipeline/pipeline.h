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


// End-to-end run: budget plan, DP classifier, selection, pre-training, DP
// fine-tuning, evaluation and diagnostics, written to one report.json.

#ifndef SELPT_PIPELINE_PIPELINE_H_
#define SELPT_PIPELINE_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "selpt/accounting/privacy_report.h"
#include "selpt/classifier/classifier_model.h"
#include "selpt/classifier/dp_training.h"
#include "selpt/classifier/featurizer.h"
#include "selpt/lm/toy_lm.h"
#include "selpt/lm/training.h"
#include "selpt/pipeline/config.h"

namespace selpt::pipeline {

struct RunReport {
  absl::Status status;
  std::string stage;  // last stage entered; where a failed run stopped
  Mode mode = Mode::kSelective;
  std::string config_hash;
  uint64_t seed = 0;
  std::map<std::string, uint64_t> sub_seeds;

  std::optional<BudgetPlan> plan;
  std::optional<accounting::PrivacyReport> privacy;
  std::optional<classifier::ClassifierSampling> classifier_sampling;
  std::optional<lm::FinetuneSampling> finetune_sampling;

  nlohmann::json selection;    // SelectionSummary, or null
  nlohmann::json diagnostics;  // DiagnosticReport, or null
  int vocab_size = 0;
  int64_t pretrain_sequences = 0;
  int64_t pretrain_tokens = 0;
  std::optional<lm::Evaluation> pretrained_evaluation;  // before fine-tuning
  std::optional<lm::Evaluation> evaluation;             // on target_test
};

nlohmann::json ToJson(const RunReport& report);

// Runs config.mode. Never throws; failures come back in report.status and
// are also written to report.json when the output directory is usable. An
// over-spent budget fails before any private computation.
RunReport Run(const PipelineConfig& config);

// Classifier weights plus a JSON sidecar (path + ".json") with the feature
// settings needed to score with it.
struct ClassifierArtifact {
  classifier::ClassifierModel model;
  classifier::FeatureConfig features;
};

absl::Status SaveClassifierArtifact(const classifier::ClassifierModel& model,
                                    const classifier::FeatureConfig& features,
                                    const std::string& path);
absl::StatusOr<ClassifierArtifact> LoadClassifierArtifact(
    const std::string& path);

// Writes to a sibling temporary file, then renames over `path`.
absl::Status WriteFileAtomically(const std::string& path,
                                 const std::string& contents);

// Exclusive per-directory lock held for the lifetime of the object.
class DirectoryLock {
 public:
  static absl::StatusOr<DirectoryLock> Acquire(const std::string& dir);
  DirectoryLock(DirectoryLock&& other) noexcept;
  DirectoryLock& operator=(DirectoryLock&&) = delete;
  ~DirectoryLock();

 private:
  explicit DirectoryLock(std::string path) : path_(std::move(path)) {}
  std::string path_;
};

}  // namespace selpt::pipeline

#endif  // SELPT_PIPELINE_PIPELINE_H_
