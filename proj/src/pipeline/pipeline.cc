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


#include "selpt/pipeline/pipeline.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "selpt/classifier/train_set.h"
#include "selpt/common/random.h"
#include "selpt/common/status_macros.h"
#include "selpt/common/threads.h"
#include "selpt/diagnostics/term_overlap.h"
#include "selpt/lm/vocabulary.h"
#include "selpt/selection/corpus_io.h"
#include "selpt/selection/scoring.h"
#include "selpt/selection/selector.h"

namespace selpt::pipeline {
namespace {

namespace fs = std::filesystem;
using accounting::PrivacyBudget;
using accounting::StageAccount;
using selection::Sequence;

std::vector<std::string> Texts(std::span<const Sequence> corpus) {
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (const Sequence& s : corpus) out.push_back(s.text);
  return out;
}

std::vector<lm::TokenSequence> Encode(const lm::Vocabulary& vocab,
                                      std::span<const Sequence> corpus) {
  std::vector<lm::TokenSequence> out;
  out.reserve(corpus.size());
  for (const Sequence& s : corpus) {
    lm::TokenSequence tokens = vocab.Encode(s.text);
    if (!tokens.empty()) out.push_back(std::move(tokens));
  }
  return out;
}

nlohmann::json EvaluationJson(const std::optional<lm::Evaluation>& e) {
  if (!e.has_value()) return nullptr;
  return {{"perplexity", e->perplexity},
          {"top1_accuracy", e->top1_accuracy},
          {"mean_loss", e->mean_loss},
          {"positions", e->positions}};
}

bool WithinCap(const PrivacyBudget& spent, const PrivacyBudget& cap) {
  constexpr double kRoundoff = 1e-12;
  return spent.epsilon <= cap.epsilon && spent.delta <= cap.delta * (1 + kRoundoff);
}

int64_t TotalTokens(std::span<const Sequence> corpus) {
  int64_t total = 0;
  for (const Sequence& s : corpus) total += s.token_count;
  return total;
}

class Runner {
 public:
  Runner(const PipelineConfig& config, RunReport& report)
      : config_(config), report_(report) {}

  absl::Status Execute();

 private:
  void Enter(std::string stage) { report_.stage = std::move(stage); }
  uint64_t Seed(const std::string& label) {
    const uint64_t s = SubSeed(config_.seed, label);
    report_.sub_seeds[label] = s;
    return s;
  }
  std::string Output(const std::string& name) const {
    return (fs::path(config_.output_dir) / name).string();
  }

  absl::Status PlanPrivacy();
  absl::Status SelectPretrainingData();
  absl::Status TrainLm();

  const PipelineConfig& config_;
  RunReport& report_;
  int threads_ = 1;

  std::vector<Sequence> target_train_;
  std::vector<Sequence> target_test_;
  std::vector<Sequence> source_;

  StageAccount selection_stage_;
  StageAccount finetune_stage_;
  std::vector<Sequence> pretraining_;
};

absl::Status Runner::Execute() {
  threads_ = config_.threads > 0 ? config_.threads : WorkerThreads();

  Enter("read");
  ASSIGN_OR_RETURN(target_train_, selection::ReadCorpus(config_.target_train_path));
  ASSIGN_OR_RETURN(target_test_, selection::ReadCorpus(config_.target_test_path));
  ASSIGN_OR_RETURN(source_, selection::ReadCorpus(config_.source_path));
  if (target_train_.empty() || target_test_.empty() || source_.empty()) {
    return absl::InvalidArgumentError("every corpus must be non-empty");
  }

  // Nothing private runs before this returns.
  Enter("plan");
  RETURN_IF_ERROR(PlanPrivacy());

  Enter("select");
  RETURN_IF_ERROR(SelectPretrainingData());

  Enter("lm");
  RETURN_IF_ERROR(TrainLm());

  Enter("diagnostics");
  std::map<std::string, std::vector<std::string>> subsets;
  if (config_.mode == Mode::kSelective || config_.mode == Mode::kRandom) {
    subsets["selected"] = Texts(pretraining_);
  }
  ASSIGN_OR_RETURN(
      report_.diagnostics,
      diagnostics::DiagnosticReport(Texts(target_train_), Texts(source_),
                                    subsets, config_.diagnostics_k,
                                    diagnostics::DefaultExclusionList()));
  Enter("done");
  return absl::OkStatus();
}

absl::Status Runner::PlanPrivacy() {
  ASSIGN_OR_RETURN(BudgetPlan plan, PlanBudgets(config_));
  report_.plan = plan;
  const size_t n = target_train_.size();

  if (config_.mode == Mode::kSelective) {
    const size_t set_size = n * (1 + classifier::kNegativesPerPositive);
    if (source_.size() < n * classifier::kNegativesPerPositive) {
      return absl::FailedPreconditionError(absl::StrCat(
          "source has ", source_.size(), " sequences; the classifier needs ",
          n * classifier::kNegativesPerPositive, " negatives"));
    }
    classifier::ClassifierTrainConfig cc = config_.classifier;
    cc.seed = Seed("classifier");
    ASSIGN_OR_RETURN(classifier::ClassifierSampling sampling,
                     classifier::PlanSampling(n, set_size, cc));
    report_.classifier_sampling = sampling;
    ASSIGN_OR_RETURN(selection_stage_,
                     classifier::PlanClassifierPrivacy(n, set_size, cc,
                                                       plan.selection));
  } else {
    selection_stage_ = accounting::FreeStage("selection");
  }

  lm::FinetuneConfig fc = config_.finetune;
  fc.seed = Seed("finetune");
  ASSIGN_OR_RETURN(report_.finetune_sampling,
                   lm::PlanFinetuneSampling(n, fc));
  ASSIGN_OR_RETURN(finetune_stage_,
                   lm::PlanFinetunePrivacy(n, fc, plan.finetune));

  ASSIGN_OR_RETURN(accounting::PrivacyReport privacy,
                   accounting::ComposeReport(selection_stage_, finetune_stage_,
                                             plan.delta_slack));
  report_.privacy = privacy;
  if (!WithinCap(privacy.total, config_.total)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "planned spend (", privacy.total.epsilon, ", ", privacy.total.delta,
        ") exceeds the configured budget (", config_.total.epsilon, ", ",
        config_.total.delta, ")"));
  }
  return absl::OkStatus();
}

absl::Status Runner::SelectPretrainingData() {
  const int64_t source_tokens = TotalTokens(source_);
  int64_t budget = config_.token_budget;
  if (budget <= 0) {
    budget = std::max<int64_t>(
        1, static_cast<int64_t>(std::floor(config_.token_budget_fraction *
                                           static_cast<double>(source_tokens))));
  }

  switch (config_.mode) {
    case Mode::kNoPretrain:
      return absl::OkStatus();
    case Mode::kFullSource:
      pretraining_ = source_;
      report_.selection = {{"num_selected", source_.size()},
                           {"total_tokens", source_tokens},
                           {"budget", nullptr},
                           {"cutoff_score", nullptr}};
      return absl::OkStatus();
    case Mode::kRandom: {
      std::vector<selection::ScoredSequence> unscored;
      unscored.reserve(source_.size());
      for (const Sequence& s : source_) {
        unscored.push_back({s.id, 0.0, s.token_count});
      }
      ASSIGN_OR_RETURN(selection::SelectionResult result,
                       selection::RandomBaseline(unscored, budget,
                                                 Seed("random-selection")));
      report_.selection = selection::SelectionSummary(result);
      RETURN_IF_ERROR(WriteFileAtomically(Output("selected.jsonl"),
                                          selection::SelectionToJsonl(result)));
      RETURN_IF_ERROR(selection::MaterializeSelection(
          result, source_, Output("pretraining.jsonl")));
      ASSIGN_OR_RETURN(pretraining_,
                       selection::ReadCorpus(Output("pretraining.jsonl")));
      return absl::OkStatus();
    }
    case Mode::kSelective:
      break;
  }

  // Private step 1: the domain classifier.
  ASSIGN_OR_RETURN(classifier::ClassifierTrainSet set,
                   classifier::BuildTrainSet(Texts(target_train_),
                                             Texts(source_),
                                             Seed("classifier-negatives"),
                                             config_.features));
  classifier::ClassifierTrainConfig cc = config_.classifier;
  cc.seed = report_.sub_seeds.at("classifier");
  cc.noise_multiplier = selection_stage_.mechanism->noise_multiplier;
  ASSIGN_OR_RETURN(classifier::ClassifierTrainResult trained,
                   classifier::TrainClassifierDp(set, cc, report_.plan->selection));
  if (trained.privacy.budget.epsilon > selection_stage_.budget.epsilon) {
    return absl::InternalError("classifier spent more than planned");
  }
  RETURN_IF_ERROR(SaveClassifierArtifact(trained.model, config_.features,
                                         Output("classifier.bin")));

  // Post-processing: scores and the budgeted top slice.
  std::vector<selection::ScoredSequence> scored = selection::ScoreCorpus(
      trained.model, config_.features, source_, threads_);
  ASSIGN_OR_RETURN(selection::SelectionResult result,
                   selection::SelectTop(scored, budget, threads_));
  report_.selection = selection::SelectionSummary(result);
  RETURN_IF_ERROR(WriteFileAtomically(Output("selected.jsonl"),
                                      selection::SelectionToJsonl(result)));
  RETURN_IF_ERROR(selection::MaterializeSelection(
      result, source_, Output("pretraining.jsonl")));
  ASSIGN_OR_RETURN(pretraining_,
                   selection::ReadCorpus(Output("pretraining.jsonl")));
  return absl::OkStatus();
}

absl::Status Runner::TrainLm() {
  // Built from public text only, and identical across modes.
  ASSIGN_OR_RETURN(lm::Vocabulary vocab,
                   lm::Vocabulary::Build(Texts(source_), config_.max_vocab,
                                         config_.min_count));
  RETURN_IF_ERROR(vocab.Save(Output("vocab.txt")));
  report_.vocab_size = vocab.size();

  lm::ToyLmConfig shape = config_.lm_shape;
  shape.vocab_size = vocab.size();
  ASSIGN_OR_RETURN(lm::ToyLmModel model, lm::ToyLmModel::Create(shape));
  model.Initialize(Seed("lm-init"));

  if (config_.mode != Mode::kNoPretrain) {
    std::vector<lm::TokenSequence> corpus = Encode(vocab, pretraining_);
    if (corpus.empty()) {
      return absl::FailedPreconditionError("nothing to pre-train on");
    }
    report_.pretrain_sequences = static_cast<int64_t>(corpus.size());
    report_.pretrain_tokens = TotalTokens(pretraining_);
    lm::PretrainSchedule schedule = config_.pretrain;
    schedule.seed = Seed("pretrain");
    schedule.batch_size = std::min<int64_t>(schedule.batch_size, corpus.size());
    RETURN_IF_ERROR(lm::Pretrain(model, corpus, schedule, threads_).status());
  }

  std::vector<lm::TokenSequence> train = Encode(vocab, target_train_);
  std::vector<lm::TokenSequence> test = Encode(vocab, target_test_);
  if (train.size() != target_train_.size()) {
    // The finetune accountant was planned for the full private set.
    return absl::InvalidArgumentError("empty private sequence");
  }
  ASSIGN_OR_RETURN(report_.pretrained_evaluation,
                   lm::Evaluate(model, test, threads_));

  // Private step 2: fine-tuning.
  lm::FinetuneConfig fc = config_.finetune;
  fc.seed = report_.sub_seeds.at("finetune");
  fc.noise_multiplier = finetune_stage_.mechanism->noise_multiplier;
  ASSIGN_OR_RETURN(lm::FinetuneResult tuned,
                   lm::FinetuneDp(model, train, fc, finetune_stage_, threads_));
  ASSIGN_OR_RETURN(report_.evaluation, lm::Evaluate(model, test, threads_));
  RETURN_IF_ERROR(lm::SaveToyLm(model, Output("lm.bin")));
  return absl::OkStatus();
}

}  // namespace

nlohmann::json ToJson(const RunReport& r) {
  nlohmann::json j;
  j["status"] = r.status.ok() ? "ok" : "failed";
  j["error"] = r.status.ok() ? nlohmann::json()
                             : nlohmann::json(r.status.ToString());
  j["stage"] = r.stage;
  j["mode"] = std::string(ModeName(r.mode));
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["sub_seeds"] = r.sub_seeds;
  if (r.plan.has_value()) {
    j["budget_plan"] = {{"selection", accounting::ToJson(r.plan->selection)},
                        {"finetune", accounting::ToJson(r.plan->finetune)},
                        {"delta_slack", r.plan->delta_slack}};
  } else {
    j["budget_plan"] = nullptr;
  }
  j["privacy"] = r.privacy.has_value() ? accounting::ToJson(*r.privacy)
                                       : nlohmann::json();
  if (r.classifier_sampling.has_value()) {
    j["classifier_sampling"] = {
        {"expected_batch_size", r.classifier_sampling->expected_batch_size},
        {"sampling_rate", r.classifier_sampling->sampling_rate},
        {"steps", r.classifier_sampling->steps}};
  } else {
    j["classifier_sampling"] = nullptr;
  }
  if (r.finetune_sampling.has_value()) {
    j["finetune_sampling"] = {
        {"expected_batch_size", r.finetune_sampling->expected_batch_size},
        {"sampling_rate", r.finetune_sampling->sampling_rate},
        {"steps", r.finetune_sampling->steps}};
  } else {
    j["finetune_sampling"] = nullptr;
  }
  j["selection"] = r.selection;
  j["pretraining"] = {{"sequences", r.pretrain_sequences},
                      {"tokens", r.pretrain_tokens},
                      {"vocab_size", r.vocab_size}};
  j["evaluation"] = {
      {"pretrained", EvaluationJson(r.pretrained_evaluation)},
      {"finetuned", EvaluationJson(r.evaluation)}};
  j["diagnostics"] = r.diagnostics;
  return j;
}

RunReport Run(const PipelineConfig& config) {
  RunReport report;
  report.mode = config.mode;
  report.seed = config.seed;
  report.config_hash = ConfigHash(config);
  report.stage = "validate";

  std::vector<Finding> findings = ValidateConfig(config);
  if (HasErrors(findings)) {
    std::string message = "invalid config";
    for (const Finding& f : findings) {
      if (f.severity == Finding::Severity::kError) {
        absl::StrAppend(&message, "; ", f.key, ": ", f.message);
      }
    }
    report.status = absl::InvalidArgumentError(message);
    return report;
  }

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    report.status = absl::PermissionDeniedError(
        absl::StrCat("cannot create ", config.output_dir, ": ", ec.message()));
    return report;
  }
  absl::StatusOr<DirectoryLock> lock = DirectoryLock::Acquire(config.output_dir);
  if (!lock.ok()) {
    report.status = lock.status();
    return report;
  }

  Runner runner(config, report);
  report.status = runner.Execute();

  const std::string path = (fs::path(config.output_dir) / "report.json").string();
  absl::Status written = WriteFileAtomically(path, ToJson(report).dump(2) + "\n");
  if (report.status.ok() && !written.ok()) report.status = written;
  return report;
}

absl::Status SaveClassifierArtifact(const classifier::ClassifierModel& model,
                                    const classifier::FeatureConfig& features,
                                    const std::string& path) {
  if (model.hash_bits() != features.hash_bits) {
    return absl::InvalidArgumentError("model and feature hash_bits differ");
  }
  RETURN_IF_ERROR(classifier::SaveClassifier(model, path));
  nlohmann::json sidecar = {{"hash_bits", features.hash_bits},
                            {"bigrams", features.bigrams},
                            {"l2_normalize", features.l2_normalize},
                            {"hidden_width", model.hidden_width()}};
  return WriteFileAtomically(path + ".json", sidecar.dump(2) + "\n");
}

absl::StatusOr<ClassifierArtifact> LoadClassifierArtifact(
    const std::string& path) {
  ASSIGN_OR_RETURN(classifier::ClassifierModel model,
                   classifier::LoadClassifier(path));
  std::ifstream in(path + ".json");
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path, ".json"));
  classifier::FeatureConfig features;
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    features.hash_bits = j.at("hash_bits").get<int>();
    features.bigrams = j.at("bigrams").get<bool>();
    features.l2_normalize = j.at("l2_normalize").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ".json: ", e.what()));
  }
  RETURN_IF_ERROR(features.Validate());
  if (features.hash_bits != model.hash_bits()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": sidecar hash_bits does not match the weights"));
  }
  return ClassifierArtifact{std::move(model), features};
}

absl::Status WriteFileAtomically(const std::string& path,
                                 const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", tmp));
    out << contents;
    out.flush();
    if (!out) return absl::DataLossError(absl::StrCat("short write to ", tmp));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot rename ", tmp, ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<DirectoryLock> DirectoryLock::Acquire(const std::string& dir) {
  std::string path = (fs::path(dir) / ".selpt.lock").string();
  const int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      return absl::FailedPreconditionError(absl::StrCat(
          dir, " is locked by another run (remove ", path,
          " if no run is active)"));
    }
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", path, ": ", std::strerror(errno)));
  }
  const std::string pid = absl::StrCat(::getpid(), "\n");
  (void)!::write(fd, pid.data(), pid.size());
  ::close(fd);
  return DirectoryLock(std::move(path));
}

DirectoryLock::DirectoryLock(DirectoryLock&& other) noexcept
    : path_(std::exchange(other.path_, std::string())) {}

DirectoryLock::~DirectoryLock() {
  if (!path_.empty()) {
    std::error_code ec;
    fs::remove(path_, ec);
  }
}

}  // namespace selpt::pipeline
