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


// Pre-training and DP fine-tuning of the toy LM.
//
// The DP unit is one sequence: its gradient is the gradient of the mean
// loss over its positions.

#ifndef SELPT_LM_TRAINING_H_
#define SELPT_LM_TRAINING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "selpt/accounting/privacy_budget.h"
#include "selpt/accounting/privacy_loss_distribution.h"
#include "selpt/accounting/privacy_report.h"
#include "selpt/dp/adam.h"
#include "selpt/dp/dp_optimizer.h"
#include "selpt/lm/toy_lm.h"

namespace selpt::lm {

struct PretrainSchedule {
  int64_t steps = 1000;
  int batch_size = 32;
  dp::AdamHyperparameters adam = {.learning_rate = 3e-3, .weight_decay = 0.01};
  bool linear_decay = true;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

struct TrainingTrace {
  std::vector<double> step_loss;  // mean batch loss before each update
};

// Non-private Adam. Each step draws batch_size distinct sequences.
absl::StatusOr<TrainingTrace> Pretrain(ToyLmModel& model,
                                       std::span<const TokenSequence> corpus,
                                       const PretrainSchedule& schedule,
                                       int threads = 1);

struct FinetuneConfig {
  double epochs = 30;
  // Expected batch floor(batch_fraction N); sampling rate batch / N.
  double batch_fraction = 0.03;
  double clip_norm = 1.0;
  // Fixed multiplier. When unset it is calibrated to the target budget,
  // after any stages passed to PlanFinetunePrivacy.
  std::optional<double> noise_multiplier;
  dp::AdamHyperparameters adam = {.learning_rate = 1e-3};
  uint64_t seed = 0;

  absl::Status Validate() const;
};

struct FinetuneSampling {
  int64_t expected_batch_size = 0;
  double sampling_rate = 0.0;
  int64_t steps = 0;
};

absl::StatusOr<FinetuneSampling> PlanFinetuneSampling(size_t corpus_size,
                                                      const FinetuneConfig& config);

// Privacy cost of fine-tuning at target.delta, computed without data. A fixed
// multiplier must fit within target.epsilon; a multiplier of 0 costs +inf.
absl::StatusOr<accounting::StageAccount> PlanFinetunePrivacy(
    size_t corpus_size, const FinetuneConfig& config,
    const accounting::PrivacyBudget& target,
    const accounting::PldOptions& pld = {});

struct FinetuneResult {
  TrainingTrace trace;
  FinetuneSampling sampling;
  accounting::StageAccount privacy;
};

// DP-Adam: Poisson batches, per-sequence clipping, Gaussian noise, division
// by the expected batch size. `privacy` must come from PlanFinetunePrivacy
// for this corpus and config.
absl::StatusOr<FinetuneResult> FinetuneDp(
    ToyLmModel& model, std::span<const TokenSequence> corpus,
    const FinetuneConfig& config, const accounting::StageAccount& privacy,
    int threads = 1);

// Same batches and optimizer as FinetuneDp with clipping and noise removed:
// the update is the plain batch-gradient sum over the expected batch size.
absl::StatusOr<TrainingTrace> FinetuneNonPrivate(
    ToyLmModel& model, std::span<const TokenSequence> corpus,
    const FinetuneConfig& config);

}  // namespace selpt::lm

#endif  // SELPT_LM_TRAINING_H_
