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


#include "selpt/classifier/dp_training.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "absl/strings/str_cat.h"
#include "selpt/accounting/calibration.h"
#include "selpt/common/random.h"
#include "selpt/common/status_macros.h"
#include "selpt/dp/dp_optimizer.h"

namespace selpt::classifier {

using accounting::MechanismSpec;
using accounting::PrivacyBudget;
using accounting::StageAccount;

absl::Status ClassifierTrainConfig::Validate() const {
  if (epochs < 1) return absl::InvalidArgumentError("epochs must be >= 1");
  if (!(batch_fraction > 0 && batch_fraction <= 1)) {
    return absl::InvalidArgumentError("batch_fraction must be in (0, 1]");
  }
  if (noise_multiplier.has_value() &&
      !(*noise_multiplier >= 0 && std::isfinite(*noise_multiplier))) {
    return absl::InvalidArgumentError("noise_multiplier must be >= 0");
  }
  if (!(clip_norm > 0)) {
    return absl::InvalidArgumentError("clip_norm must be positive");
  }
  return absl::OkStatus();
}

absl::StatusOr<ClassifierSampling> PlanSampling(
    size_t num_positives, size_t train_set_size,
    const ClassifierTrainConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  if (num_positives == 0 || train_set_size < num_positives) {
    return absl::InvalidArgumentError("invalid train set size");
  }
  ClassifierSampling plan;
  plan.expected_batch_size = std::max<int64_t>(
      1, static_cast<int64_t>(
             std::floor(config.batch_fraction * num_positives + 1e-9)));
  plan.sampling_rate = static_cast<double>(plan.expected_batch_size) /
                       static_cast<double>(train_set_size);
  plan.steps = accounting::StepsForEpochs(config.epochs, plan.sampling_rate);
  return plan;
}

absl::StatusOr<StageAccount> PlanClassifierPrivacy(
    size_t num_positives, size_t train_set_size,
    const ClassifierTrainConfig& config, const PrivacyBudget& target,
    const accounting::PldOptions& pld) {
  ASSIGN_OR_RETURN(ClassifierSampling plan,
                   PlanSampling(num_positives, train_set_size, config));
  double sigma;
  if (config.noise_multiplier.has_value()) {
    sigma = *config.noise_multiplier;
  } else {
    accounting::CalibrationOptions options;
    options.pld = pld;
    ASSIGN_OR_RETURN(sigma, accounting::CalibrateNoise(
                                target, plan.sampling_rate, plan.steps, options));
  }
  const MechanismSpec mechanism{sigma, plan.sampling_rate, plan.steps};
  if (sigma == 0) {
    StageAccount stage;
    stage.name = "selection";
    stage.mechanism = mechanism;
    stage.budget = {std::numeric_limits<double>::infinity(), target.delta};
    return stage;
  }
  ASSIGN_OR_RETURN(StageAccount stage, accounting::AccountStage(
                                           "selection", mechanism, target.delta,
                                           pld));
  if (stage.budget.epsilon > target.epsilon * (1 + 1e-12)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "classifier training would spend epsilon ", stage.budget.epsilon,
        ", above its allocation ", target.epsilon));
  }
  return stage;
}

absl::StatusOr<ClassifierTrainResult> TrainClassifierDp(
    const ClassifierTrainSet& train_set, const ClassifierTrainConfig& config,
    const PrivacyBudget& target, const accounting::PldOptions& pld) {
  RETURN_IF_ERROR(train_set.Validate(/*allow_any_ratio=*/true));
  ASSIGN_OR_RETURN(ClassifierSampling plan,
                   PlanSampling(train_set.positives.size(), train_set.size(),
                                config));
  ASSIGN_OR_RETURN(StageAccount privacy,
                   PlanClassifierPrivacy(train_set.positives.size(),
                                         train_set.size(), config, target, pld));
  ASSIGN_OR_RETURN(ClassifierModel model,
                   ClassifierModel::Create(train_set.hash_bits,
                                           config.hidden_width));
  model.Initialize(SubSeed(config.seed, "classifier-init"));
  ASSIGN_OR_RETURN(dp::AdamState adam,
                   dp::AdamState::Create(model.num_parameters(), config.adam));

  const dp::DpSgdConfig dp_config{
      config.clip_norm, privacy.mechanism->noise_multiplier,
      static_cast<double>(plan.expected_batch_size)};
  RETURN_IF_ERROR(dp_config.Validate());
  const uint64_t batch_seed = SubSeed(config.seed, "classifier-batches");
  const uint64_t noise_seed = SubSeed(config.seed, "dp-noise");
  std::vector<double> sum;
  for (int64_t step = 0; step < plan.steps; ++step) {
    CounterRng batch_rng(SubSeed(batch_seed, static_cast<uint64_t>(step)));
    const std::vector<size_t> batch =
        PoissonSample(train_set.size(), plan.sampling_rate, batch_rng);
    // Sparse per-example gradients, clipped and accumulated in index order.
    sum.assign(model.num_parameters(), 0.0);
    for (size_t i : batch) {
      const SparseGradient g =
          model.LossGradient(train_set.example(i), train_set.label(i));
      const double factor = dp::ClipFactor(g.L2Norm(), config.clip_norm);
      for (size_t n = 0; n < g.index.size(); ++n) {
        sum[g.index[n]] += factor * g.value[n];
      }
    }
    ASSIGN_OR_RETURN(std::vector<double> noisy,
                     dp::AddNoiseAndNormalize(
                         std::move(sum), dp_config,
                         SubSeed(noise_seed, static_cast<uint64_t>(step))));
    RETURN_IF_ERROR(dp::ApplyAdam(adam, noisy, model.mutable_parameters()));
    sum = std::move(noisy);
  }
  RETURN_IF_ERROR(model.Validate());
  return ClassifierTrainResult{std::move(model), plan, std::move(privacy)};
}

double MeanLoss(const ClassifierModel& model, const ClassifierTrainSet& data) {
  double total = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    total += model.Loss(data.example(i), data.label(i));
  }
  return data.size() == 0 ? 0.0 : total / data.size();
}

double F1Score(const ClassifierModel& model, const ClassifierTrainSet& data) {
  double tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    const bool predicted = model.Score(data.example(i)) > 0;
    const bool actual = data.label(i) == 1;
    tp += predicted && actual;
    fp += predicted && !actual;
    fn += !predicted && actual;
  }
  return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

}  // namespace selpt::classifier
