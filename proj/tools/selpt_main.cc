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


// selpt: command-line front end.
//
//   selpt validate --config run.ini
//   selpt run --config run.ini [--mode random] [--seed 3]
//   selpt score --classifier out/classifier.bin --corpus source.jsonl
//   selpt select --scores scores.jsonl --budget-fraction 0.1
//   selpt account --sigma 1.0 --q 0.03 --steps 1000 --delta 1e-7
//   selpt synth --out-dir data/ --seed 0
//   selpt template

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "selpt/accounting/privacy_budget.h"
#include "selpt/accounting/prv_accountant.h"
#include "selpt/accounting/rdp_accountant.h"
#include "selpt/common/status_macros.h"
#include "selpt/common/threads.h"
#include "selpt/pipeline/config.h"
#include "selpt/pipeline/pipeline.h"
#include "selpt/pipeline/synthetic.h"
#include "selpt/selection/corpus_io.h"
#include "selpt/selection/scoring.h"
#include "selpt/selection/selector.h"

namespace {

using namespace selpt;  // NOLINT

int Fail(const absl::Status& status) {
  std::cerr << "selpt: " << status << "\n";
  return 1;
}

absl::Status WriteOrPrint(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return absl::OkStatus();
  }
  return pipeline::WriteFileAtomically(path, text);
}

absl::StatusOr<std::vector<selection::ScoredSequence>> ReadScores(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError("cannot open " + path);
  std::vector<selection::ScoredSequence> out;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      out.push_back({j.at("id").get<uint64_t>(), j.at("score").get<double>(),
                     j.at("token_count").get<int64_t>()});
    } catch (const nlohmann::json::exception& e) {
      return absl::InvalidArgumentError(path + ":" + std::to_string(line_no) +
                                        ": " + e.what());
    }
  }
  return out;
}

struct ValidateArgs {
  std::string config;
};

int Validate(const ValidateArgs& args) {
  absl::StatusOr<pipeline::PipelineConfig> config =
      pipeline::LoadConfig(args.config);
  if (!config.ok()) return Fail(config.status());
  std::vector<pipeline::Finding> findings = pipeline::ValidateConfig(*config);
  for (const auto& f : findings) std::cout << pipeline::FormatFinding(f) << "\n";
  if (findings.empty()) std::cout << "ok\n";
  return pipeline::HasErrors(findings) ? 1 : 0;
}

struct RunArgs {
  std::string config;
  std::string mode;
  std::optional<uint64_t> seed;
  std::string output_dir;
};

int Run(const RunArgs& args) {
  absl::StatusOr<pipeline::PipelineConfig> config =
      pipeline::LoadConfig(args.config);
  if (!config.ok()) return Fail(config.status());
  if (!args.mode.empty()) {
    absl::StatusOr<pipeline::Mode> mode = pipeline::ParseMode(args.mode);
    if (!mode.ok()) return Fail(mode.status());
    config->mode = *mode;
  }
  if (args.seed.has_value()) config->seed = *args.seed;
  if (!args.output_dir.empty()) config->output_dir = args.output_dir;

  pipeline::RunReport report = pipeline::Run(*config);
  if (!report.status.ok()) {
    std::cerr << "selpt: run failed at stage '" << report.stage << "'\n";
    return Fail(report.status);
  }
  const nlohmann::json j = pipeline::ToJson(report);
  std::cout << "mode " << j["mode"].get<std::string>() << "\n"
            << "total budget " << j["privacy"]["total"].dump() << " ("
            << j["privacy"]["composition_rule"].get<std::string>() << ")\n"
            << "test perplexity "
            << j["evaluation"]["finetuned"]["perplexity"].get<double>() << "\n"
            << "report " << config->output_dir << "/report.json\n";
  return 0;
}

struct ScoreArgs {
  std::string classifier;
  std::string corpus;
  std::string out;
  int threads = 0;
};

int Score(const ScoreArgs& args) {
  absl::StatusOr<pipeline::ClassifierArtifact> artifact =
      pipeline::LoadClassifierArtifact(args.classifier);
  if (!artifact.ok()) return Fail(artifact.status());
  absl::StatusOr<std::vector<selection::Sequence>> corpus =
      selection::ReadCorpus(args.corpus);
  if (!corpus.ok()) return Fail(corpus.status());
  const int threads = args.threads > 0 ? args.threads : WorkerThreads();
  std::vector<selection::ScoredSequence> scored = selection::ScoreCorpus(
      artifact->model, artifact->features, *corpus, threads);
  std::string text;
  for (const auto& s : scored) {
    text += nlohmann::json{{"id", s.id}, {"score", s.score},
                           {"token_count", s.token_count}}
                .dump();
    text += "\n";
  }
  absl::Status written = WriteOrPrint(args.out, text);
  return written.ok() ? 0 : Fail(written);
}

struct SelectArgs {
  std::string scores;
  int64_t budget = 0;
  double budget_fraction = 0.0;
  bool random = false;
  uint64_t seed = 0;
  std::string out;
  int threads = 0;
};

int Select(const SelectArgs& args) {
  absl::StatusOr<std::vector<selection::ScoredSequence>> scored =
      ReadScores(args.scores);
  if (!scored.ok()) return Fail(scored.status());
  int64_t budget = args.budget;
  if (budget <= 0) {
    int64_t total = 0;
    for (const auto& s : *scored) total += s.token_count;
    budget = std::max<int64_t>(
        1, static_cast<int64_t>(args.budget_fraction * static_cast<double>(total)));
  }
  const int threads = args.threads > 0 ? args.threads : WorkerThreads();
  absl::StatusOr<selection::SelectionResult> result =
      args.random ? selection::RandomBaseline(*scored, budget, args.seed)
                  : selection::SelectTop(*scored, budget, threads);
  if (!result.ok()) return Fail(result.status());
  absl::Status written =
      WriteOrPrint(args.out, selection::SelectionToJsonl(*result));
  if (!written.ok()) return Fail(written);
  std::cerr << selection::SelectionSummary(*result).dump() << "\n";
  return 0;
}

struct AccountArgs {
  double sigma = 1.0;
  double q = 1.0;
  int64_t steps = 1;
  double delta = 1e-5;
  bool rdp = false;
};

int Account(const AccountArgs& args) {
  const accounting::MechanismSpec spec{args.sigma, args.q, args.steps};
  absl::StatusOr<double> eps = accounting::PrvEpsilon(spec, args.delta);
  if (!eps.ok()) return Fail(eps.status());
  std::cout << *eps << "\n";
  if (args.rdp) {
    absl::StatusOr<double> rdp = accounting::RdpEpsilon(spec, args.delta);
    if (!rdp.ok()) return Fail(rdp.status());
    std::cout << "rdp " << *rdp << "\n";
  }
  return 0;
}

int Synth(const pipeline::SyntheticSpec& spec, const std::string& dir) {
  absl::StatusOr<pipeline::SyntheticCorpora> corpora =
      pipeline::GenerateSynthetic(spec);
  if (!corpora.ok()) return Fail(corpora.status());
  absl::Status written = pipeline::WriteSynthetic(*corpora, dir);
  return written.ok() ? 0 : Fail(written);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private domain-adaptive pre-training data selection"};
  app.require_subcommand(1);

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("--config", validate_args.config)->required();

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run the pipeline");
  run->add_option("--config", run_args.config)->required();
  run->add_option("--mode", run_args.mode,
                  "selective, random, full-source or no-pretrain");
  run->add_option("--seed", run_args.seed);
  run->add_option("--output-dir", run_args.output_dir);

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score a corpus with a classifier");
  score->add_option("--classifier", score_args.classifier)->required();
  score->add_option("--corpus", score_args.corpus)->required();
  score->add_option("--out", score_args.out, "default: stdout");
  score->add_option("--threads", score_args.threads);

  SelectArgs select_args;
  auto* select = app.add_subcommand("select", "Select by score under a token budget");
  select->add_option("--scores", select_args.scores)->required();
  auto* budget = select->add_option("--budget", select_args.budget, "tokens");
  auto* fraction = select->add_option("--budget-fraction",
                                      select_args.budget_fraction,
                                      "share of the corpus tokens");
  budget->excludes(fraction);
  select->add_flag("--random", select_args.random, "uniform baseline");
  select->add_option("--seed", select_args.seed);
  select->add_option("--out", select_args.out, "default: stdout");
  select->add_option("--threads", select_args.threads);

  AccountArgs account_args;
  auto* account = app.add_subcommand("account", "Print epsilon for DP-SGD");
  account->add_option("--sigma", account_args.sigma)->required();
  account->add_option("--q", account_args.q)->required();
  account->add_option("--steps", account_args.steps)->required();
  account->add_option("--delta", account_args.delta)->required();
  account->add_flag("--rdp", account_args.rdp, "also print the RDP bound");

  pipeline::SyntheticSpec synth_spec;
  std::string synth_dir;
  auto* synth = app.add_subcommand("synth", "Write a synthetic benchmark");
  synth->add_option("--out-dir", synth_dir)->required();
  synth->add_option("--seed", synth_spec.seed);
  synth->add_option("--target-train", synth_spec.target_train);
  synth->add_option("--target-test", synth_spec.target_test);
  synth->add_option("--source-size", synth_spec.source_size);
  synth->add_option("--sequence-length", synth_spec.sequence_length);
  synth->add_option("--target-fraction", synth_spec.target_fraction);

  auto* tmpl = app.add_subcommand("template", "Print a config with defaults");

  CLI11_PARSE(app, argc, argv);

  if (*validate) return Validate(validate_args);
  if (*run) return Run(run_args);
  if (*score) return Score(score_args);
  if (*select) {
    if (!*budget && !*fraction) {
      std::cerr << "selpt: select needs --budget or --budget-fraction\n";
      return 2;
    }
    return Select(select_args);
  }
  if (*account) return Account(account_args);
  if (*synth) return Synth(synth_spec, synth_dir);
  if (*tmpl) {
    pipeline::PipelineConfig defaults;
    defaults.token_budget_fraction = 0.1;
    std::cout << pipeline::ConfigToIni(defaults);
    return 0;
  }
  return 2;
}
