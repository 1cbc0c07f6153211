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


// DP training of the domain classifier.
//
// The expected batch holds floor(0.03 N) examples, N the number of targets,
// drawn by Poisson sampling from the whole 6N set. Each target therefore
// enters a step with probability 0.005, and that is the rate the accountant
// sees.

#ifndef SELPT_CLASSIFIER_DP_TRAINING_H_
#define SELPT_CLASSIFIER_DP_TRAINING_H_

#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "selpt/accounting/privacy_budget.h"
#include "selpt/accounting/privacy_loss_distribution.h"
#include "selpt/accounting/privacy_report.h"
#include "selpt/classifier/classifier_model.h"
#include "selpt/classifier/train_set.h"
#include "selpt/dp/adam.h"

namespace selpt::classifier {

struct ClassifierTrainConfig {
  int hidden_width = 0;
  int epochs = 3;
  double clip_norm = 1.0;
  // Fixed multiplier. When unset it is calibrated to the target budget.
  std::optional<double> noise_multiplier;
  double batch_fraction = 0.03;
  dp::AdamHyperparameters adam = {.learning_rate = 0.05};
  uint64_t seed = 0;

  absl::Status Validate() const;
};

struct ClassifierSampling {
  int64_t expected_batch_size = 0;
  double sampling_rate = 0.0;
  int64_t steps = 0;
};

absl::StatusOr<ClassifierSampling> PlanSampling(size_t num_positives,
                                                size_t train_set_size,
                                                const ClassifierTrainConfig& config);

// Privacy cost of training, computed without touching data. With a fixed
// multiplier the stage is accounted at target.delta and must not exceed
// target.epsilon. A multiplier of 0 is non-private: epsilon is +inf.
absl::StatusOr<accounting::StageAccount> PlanClassifierPrivacy(
    size_t num_positives, size_t train_set_size,
    const ClassifierTrainConfig& config, const accounting::PrivacyBudget& target,
    const accounting::PldOptions& pld = {});

struct ClassifierTrainResult {
  ClassifierModel model;
  ClassifierSampling sampling;
  accounting::StageAccount privacy;
};

absl::StatusOr<ClassifierTrainResult> TrainClassifierDp(
    const ClassifierTrainSet& train_set, const ClassifierTrainConfig& config,
    const accounting::PrivacyBudget& target,
    const accounting::PldOptions& pld = {});

// Mean logistic loss over the train set.
double MeanLoss(const ClassifierModel& model, const ClassifierTrainSet& data);

// F1 of the positive class at threshold 0.5.
double F1Score(const ClassifierModel& model, const ClassifierTrainSet& data);

}  // namespace selpt::classifier

#endif  // SELPT_CLASSIFIER_DP_TRAINING_H_
