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


#include "selpt/lm/training.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "selpt/accounting/calibration.h"
#include "selpt/common/random.h"
#include "selpt/common/status_macros.h"
#include "selpt/common/threads.h"

namespace selpt::lm {
namespace {

using accounting::MechanismSpec;
using accounting::StageAccount;

absl::Status ValidateCorpus(const ToyLmModel& model,
                            std::span<const TokenSequence> corpus) {
  if (corpus.empty()) return absl::InvalidArgumentError("training corpus is empty");
  for (const TokenSequence& seq : corpus) {
    RETURN_IF_ERROR(model.ValidateSequence(seq));
  }
  return absl::OkStatus();
}

// Per-sequence gradients of `batch`, each scaled by min(1, clip / norm)
// (no clipping for an infinite clip), summed pairwise in batch order.
// Gradients are computed `threads` at a time; the sum does not depend on it.
std::vector<double> ClippedGradientSum(const ToyLmModel& model,
                                       std::span<const TokenSequence> corpus,
                                       std::span<const size_t> batch,
                                       double clip_norm, int threads,
                                       double* loss_sum) {
  const size_t p = model.num_parameters();
  const size_t lanes = std::max(1, threads);
  std::vector<std::vector<double>> buffers(lanes, std::vector<double>(p));
  std::vector<double> losses(lanes);
  dp::PairwiseAccumulator acc(p);
  *loss_sum = 0;
  for (size_t start = 0; start < batch.size(); start += lanes) {
    const size_t n = std::min(lanes, batch.size() - start);
    ParallelShards(n, static_cast<int>(n), [&](size_t lane, size_t, size_t) {
      std::vector<double>& g = buffers[lane];
      std::fill(g.begin(), g.end(), 0.0);
      losses[lane] =
          model.AccumulateGradient(corpus[batch[start + lane]], 1.0, g);
    });
    for (size_t lane = 0; lane < n; ++lane) {
      const double factor =
          std::isinf(clip_norm) ? 1.0
                                : dp::ClipFactor(dp::L2Norm(buffers[lane]), clip_norm);
      acc.Add(buffers[lane], factor);
      *loss_sum += losses[lane];
    }
  }
  return std::move(acc).Sum();
}

std::vector<size_t> PoissonBatch(const FinetuneConfig& config,
                                 const FinetuneSampling& plan, size_t n,
                                 int64_t step) {
  CounterRng rng(SubSeed(SubSeed(config.seed, "finetune-batches"),
                         static_cast<uint64_t>(step)));
  return PoissonSample(n, plan.sampling_rate, rng);
}

}  // namespace

absl::Status PretrainSchedule::Validate() const {
  if (steps < 1 || batch_size < 1) {
    return absl::InvalidArgumentError("pretraining needs steps and batch >= 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<TrainingTrace> Pretrain(ToyLmModel& model,
                                       std::span<const TokenSequence> corpus,
                                       const PretrainSchedule& schedule,
                                       int threads) {
  RETURN_IF_ERROR(schedule.Validate());
  RETURN_IF_ERROR(ValidateCorpus(model, corpus));
  ASSIGN_OR_RETURN(dp::AdamState adam,
                   dp::AdamState::Create(model.num_parameters(), schedule.adam));
  const size_t batch_size =
      std::min(corpus.size(), static_cast<size_t>(schedule.batch_size));
  const uint64_t batch_seed = SubSeed(schedule.seed, "pretrain-batches");
  TrainingTrace trace;
  trace.step_loss.reserve(schedule.steps);
  for (int64_t step = 0; step < schedule.steps; ++step) {
    CounterRng rng(SubSeed(batch_seed, static_cast<uint64_t>(step)));
    const std::vector<size_t> batch =
        SampleWithoutReplacement(corpus.size(), batch_size, rng);
    double loss_sum;
    std::vector<double> grad =
        ClippedGradientSum(model, corpus, batch,
                           std::numeric_limits<double>::infinity(), threads,
                           &loss_sum);
    for (double& g : grad) g /= static_cast<double>(batch_size);
    if (schedule.linear_decay) {
      adam.learning_rate = schedule.adam.learning_rate *
                           (1.0 - static_cast<double>(step) / schedule.steps);
    }
    RETURN_IF_ERROR(dp::ApplyAdam(adam, grad, model.mutable_parameters()));
    trace.step_loss.push_back(loss_sum / batch_size);
  }
  RETURN_IF_ERROR(model.Validate());
  return trace;
}

absl::Status FinetuneConfig::Validate() const {
  if (!(epochs > 0)) return absl::InvalidArgumentError("epochs must be positive");
  if (!(batch_fraction > 0 && batch_fraction <= 1)) {
    return absl::InvalidArgumentError("batch_fraction must be in (0, 1]");
  }
  if (!(clip_norm > 0)) return absl::InvalidArgumentError("clip_norm must be positive");
  if (noise_multiplier.has_value() &&
      !(*noise_multiplier >= 0 && std::isfinite(*noise_multiplier))) {
    return absl::InvalidArgumentError("noise_multiplier must be >= 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<FinetuneSampling> PlanFinetuneSampling(
    size_t corpus_size, const FinetuneConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  if (corpus_size == 0) return absl::InvalidArgumentError("empty target corpus");
  FinetuneSampling plan;
  plan.expected_batch_size = std::max<int64_t>(
      1, static_cast<int64_t>(
             std::floor(config.batch_fraction * corpus_size + 1e-9)));
  plan.sampling_rate =
      static_cast<double>(plan.expected_batch_size) / corpus_size;
  plan.steps = accounting::StepsForEpochs(config.epochs, plan.sampling_rate);
  return plan;
}

absl::StatusOr<StageAccount> PlanFinetunePrivacy(
    size_t corpus_size, const FinetuneConfig& config,
    const accounting::PrivacyBudget& target, const accounting::PldOptions& pld) {
  ASSIGN_OR_RETURN(FinetuneSampling plan,
                   PlanFinetuneSampling(corpus_size, config));
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
    stage.name = "finetune";
    stage.mechanism = mechanism;
    stage.budget = {std::numeric_limits<double>::infinity(), target.delta};
    return stage;
  }
  ASSIGN_OR_RETURN(StageAccount stage,
                   accounting::AccountStage("finetune", mechanism, target.delta,
                                            pld));
  if (stage.budget.epsilon > target.epsilon * (1 + 1e-12)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "fine-tuning would spend epsilon ", stage.budget.epsilon,
        ", above its allocation ", target.epsilon));
  }
  return stage;
}

absl::StatusOr<FinetuneResult> FinetuneDp(
    ToyLmModel& model, std::span<const TokenSequence> corpus,
    const FinetuneConfig& config, const StageAccount& privacy, int threads) {
  RETURN_IF_ERROR(ValidateCorpus(model, corpus));
  ASSIGN_OR_RETURN(FinetuneSampling plan,
                   PlanFinetuneSampling(corpus.size(), config));
  if (!privacy.mechanism.has_value() ||
      privacy.mechanism->sampling_rate != plan.sampling_rate ||
      privacy.mechanism->steps != plan.steps) {
    return absl::FailedPreconditionError(
        "privacy plan does not match this corpus and config");
  }
  const dp::DpSgdConfig dp_config{config.clip_norm,
                                  privacy.mechanism->noise_multiplier,
                                  static_cast<double>(plan.expected_batch_size)};
  RETURN_IF_ERROR(dp_config.Validate());
  ASSIGN_OR_RETURN(dp::AdamState adam,
                   dp::AdamState::Create(model.num_parameters(), config.adam));
  const uint64_t noise_seed = SubSeed(config.seed, "dp-noise");
  FinetuneResult result;
  result.sampling = plan;
  result.privacy = privacy;
  for (int64_t step = 0; step < plan.steps; ++step) {
    const std::vector<size_t> batch =
        PoissonBatch(config, plan, corpus.size(), step);
    double loss_sum;
    std::vector<double> sum = ClippedGradientSum(
        model, corpus, batch, config.clip_norm, threads, &loss_sum);
    ASSIGN_OR_RETURN(std::vector<double> noisy,
                     dp::AddNoiseAndNormalize(
                         std::move(sum), dp_config,
                         SubSeed(noise_seed, static_cast<uint64_t>(step))));
    RETURN_IF_ERROR(dp::ApplyAdam(adam, noisy, model.mutable_parameters()));
    result.trace.step_loss.push_back(
        batch.empty() ? std::numeric_limits<double>::quiet_NaN()
                      : loss_sum / batch.size());
  }
  RETURN_IF_ERROR(model.Validate());
  return result;
}

absl::StatusOr<TrainingTrace> FinetuneNonPrivate(
    ToyLmModel& model, std::span<const TokenSequence> corpus,
    const FinetuneConfig& config) {
  RETURN_IF_ERROR(ValidateCorpus(model, corpus));
  ASSIGN_OR_RETURN(FinetuneSampling plan,
                   PlanFinetuneSampling(corpus.size(), config));
  ASSIGN_OR_RETURN(dp::AdamState adam,
                   dp::AdamState::Create(model.num_parameters(), config.adam));
  TrainingTrace trace;
  std::vector<double> grad(model.num_parameters());
  for (int64_t step = 0; step < plan.steps; ++step) {
    const std::vector<size_t> batch =
        PoissonBatch(config, plan, corpus.size(), step);
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss_sum = 0;
    for (size_t i : batch) {
      loss_sum += model.AccumulateGradient(
          corpus[i], 1.0 / plan.expected_batch_size, grad);
    }
    RETURN_IF_ERROR(dp::ApplyAdam(adam, grad, model.mutable_parameters()));
    trace.step_loss.push_back(batch.empty()
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : loss_sum / batch.size());
  }
  RETURN_IF_ERROR(model.Validate());
  return trace;
}

}  // namespace selpt::lm
