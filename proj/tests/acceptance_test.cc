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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Reference values come from the test-only oracles here and
// in oracles.h, never from the code under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "oracles.h"
#include "selpt/accounting/calibration.h"
#include "selpt/accounting/privacy_budget.h"
#include "selpt/accounting/privacy_loss_distribution.h"
#include "selpt/accounting/prv_accountant.h"
#include "selpt/accounting/rdp_accountant.h"
#include "selpt/classifier/classifier_model.h"
#include "selpt/classifier/dp_training.h"
#include "selpt/classifier/featurizer.h"
#include "selpt/classifier/train_set.h"
#include "selpt/common/random.h"
#include "selpt/diagnostics/term_overlap.h"
#include "selpt/dp/dp_optimizer.h"
#include "selpt/lm/toy_lm.h"
#include "selpt/lm/training.h"
#include "selpt/pipeline/config.h"
#include "selpt/pipeline/pipeline.h"
#include "selpt/pipeline/synthetic.h"
#include "selpt/selection/corpus_io.h"
#include "selpt/selection/scoring.h"
#include "selpt/selection/selector.h"

namespace selpt {
namespace {

namespace fs = std::filesystem;
using accounting::MechanismSpec;
using accounting::PrivacyBudget;
using testing::AnalyticGaussianEpsilon;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// Pipeline reports collected by criterion 9 and audited by criterion 11.
std::vector<pipeline::RunReport>& AllReports() {
  static auto* reports = new std::vector<pipeline::RunReport>();
  return *reports;
}

fs::path WorkDir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 absl::StrCat("selpt_acceptance_", ::getpid());
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// 1 ------------------------------------------------------------------------

Outcome AnalyticGaussian() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
    for (double delta : {1e-5, 1e-7}) {
      auto eps = accounting::PrvEpsilon({sigma, 1.0, 1}, delta);
      if (!eps.ok()) return {false, eps.status().ToString()};
      const double truth = AnalyticGaussianEpsilon(sigma, delta);
      worst = std::max(worst, std::abs(*eps - truth) / truth);
    }
  }
  const double secs = Seconds(start);
  return {worst <= 0.01 && secs < 10,
          absl::StrFormat("max rel err %.2e over 8 settings, %.1fs", worst, secs)};
}

// 2 ------------------------------------------------------------------------

Outcome NoiseMultiplierReproduction() {
  const auto start = std::chrono::steady_clock::now();
  auto standard = accounting::CalibrateNoise({7.3, 1e-7}, 0.03, 1000);
  if (!standard.ok()) return {false, standard.status().ToString()};

  // Selection stage as the pipeline plans it: 3 epochs over 6N at q = 0.005
  // with (0.73, 2.5e-8), composed jointly with fine-tuning.
  const double q_clf = 0.005;
  const int64_t clf_steps = accounting::StepsForEpochs(3, q_clf);
  auto clf_sigma = accounting::CalibrateNoise({0.73, 2.5e-8}, q_clf, clf_steps);
  if (!clf_sigma.ok()) return {false, clf_sigma.status().ToString()};
  const MechanismSpec selection{*clf_sigma, q_clf, clf_steps};
  auto selective = accounting::CalibrateNoiseAfterStages(
      {7.3, 1e-7}, std::span(&selection, 1), 0.03, 1000);
  if (!selective.ok()) return {false, selective.status().ToString()};

  const double secs = Seconds(start);
  const bool pass = *standard >= 0.95 && *standard <= 1.05 &&
                    std::abs(*selective - 1.03) <= 0.05 &&
                    *selective > *standard && secs < 60;
  return {pass, absl::StrFormat("standard %.4f, selective %.4f (selection "
                                "sigma %.3f), %.1fs",
                                *standard, *selective, *clf_sigma, secs)};
}

// 3 ------------------------------------------------------------------------

Outcome CrossAccountantDominance() {
  const auto start = std::chrono::steady_clock::now();
  accounting::PldOptions options;
  options.loss_range = 80.0;
  int tuples = 0;
  int violations = 0;
  std::string first_violation;
  for (double sigma : {0.8, 1.2, 2.0, 4.0, 6.0}) {
    for (double q : {0.005, 0.03, 0.1, 0.25}) {
      for (int64_t steps : {1, 10, 100}) {
        for (double delta : {1e-5, 1e-7}) {
          const MechanismSpec spec{sigma, q, steps};
          auto prv = accounting::PrvEpsilon(spec, delta, options);
          auto rdp = accounting::RdpEpsilon(spec, delta);
          ++tuples;
          if (!prv.ok() || !rdp.ok() || *prv > *rdp) {
            if (++violations == 1) {
              first_violation = absl::StrFormat(
                  "; first at sigma=%g q=%g T=%d delta=%g", sigma, q, steps,
                  delta);
            }
          }
        }
      }
    }
  }
  return {tuples >= 100 && violations == 0,
          absl::StrFormat("%d tuples, %d violations%s, %.1fs", tuples,
                          violations, first_violation, Seconds(start))};
}

// 4 ------------------------------------------------------------------------

Outcome CompositionIdentity() {
  double worst = 0.0;
  for (double sigma : {2.0, 4.0, 8.0}) {
    auto single = accounting::PldForGaussian(sigma);
    if (!single.ok()) return {false, single.status().ToString()};
    for (int k : {2, 4, 16}) {
      auto composed = accounting::ComposePld(*single, k);
      if (!composed.ok()) return {false, composed.status().ToString()};
      for (double delta : {1e-5, 1e-7}) {
        auto eps = accounting::EpsilonAtDelta(*composed, delta);
        if (!eps.ok()) return {false, eps.status().ToString()};
        const double truth = AnalyticGaussianEpsilon(sigma / std::sqrt(k), delta);
        worst = std::max(worst, std::abs(*eps - truth) / truth);
      }
    }
  }
  return {worst <= 0.02,
          absl::StrFormat("max rel err %.2e over 18 settings", worst)};
}

// 5 ------------------------------------------------------------------------

// Textbook Adam, written out from the update equations.
struct OracleAdam {
  std::vector<double> m, v;
  int64_t t = 0;
  double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8;

  void Step(const std::vector<double>& g, std::vector<double>& theta) {
    if (m.empty()) {
      m.assign(g.size(), 0.0);
      v.assign(g.size(), 0.0);
    }
    ++t;
    for (size_t i = 0; i < g.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(b1, static_cast<double>(t)));
      const double vh = v[i] / (1 - std::pow(b2, static_cast<double>(t)));
      theta[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
};

Outcome DisabledPathEquivalence() {
  std::mt19937_64 rng(5);
  lm::ToyLmConfig shape{.vocab_size = 12, .embedding_dim = 4, .context = 3,
                        .hidden = 8};
  std::vector<lm::TokenSequence> corpus(24);
  for (auto& seq : corpus) {
    seq.resize(4 + rng() % 6);
    for (auto& tok : seq) tok = static_cast<int32_t>(2 + rng() % 10);
  }
  auto model = lm::ToyLmModel::Create(shape);
  if (!model.ok()) return {false, model.status().ToString()};
  model->Initialize(3);
  std::vector<double> oracle(model->parameters().begin(),
                             model->parameters().end());

  // q = 1: every sequence is in every batch, so the oracle needs no sampler.
  lm::FinetuneConfig config;
  config.epochs = 200;
  config.batch_fraction = 1.0;
  config.clip_norm = 1e9;
  config.noise_multiplier = 0.0;
  auto stage = lm::PlanFinetunePrivacy(corpus.size(), config, {1.0, 1e-6});
  if (!stage.ok()) return {false, stage.status().ToString()};
  auto result = lm::FinetuneDp(*model, corpus, config, *stage);
  if (!result.ok()) return {false, result.status().ToString()};
  if (result->sampling.steps != 200) return {false, "expected 200 steps"};

  auto reference = lm::ToyLmModel::Create(shape);
  OracleAdam adam;
  for (int step = 0; step < 200; ++step) {
    std::copy(oracle.begin(), oracle.end(),
              reference->mutable_parameters().begin());
    std::vector<double> grad(oracle.size(), 0.0);
    for (const auto& seq : corpus) {
      std::vector<double> g(oracle.size(), 0.0);
      reference->AccumulateGradient(seq, 1.0, g);
      for (size_t i = 0; i < g.size(); ++i) grad[i] += g[i];
    }
    for (double& g : grad) g /= static_cast<double>(corpus.size());
    adam.Step(grad, oracle);
  }
  std::vector<double> got(model->parameters().begin(), model->parameters().end());
  const double err = testing::RelativeError(got, oracle);
  return {err <= 1e-9, absl::StrFormat("200 steps, rel err %.2e", err)};
}

// 6 ------------------------------------------------------------------------

Outcome ClippingProperties() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int64_t rows = 0, clipped = 0, zero_rows = 0, failures = 0;
  for (int b = 0; b < 10000; ++b) {
    const size_t dim = 1 + rng() % 48;
    const size_t n = 1 + rng() % 12;
    const double clip = std::pow(10.0, 6.0 * unit(rng));
    dp::GradientBatch batch(dim);
    std::vector<double> g(dim);
    for (size_t r = 0; r < n; ++r) {
      const int kind = static_cast<int>(rng() % 8);
      const double scale = kind == 0 ? 0.0
                           : kind == 1 ? std::pow(10.0, 290.0 * unit(rng))
                                       : clip * std::pow(10.0, unit(rng));
      for (double& x : g) x = scale * unit(rng);
      (void)batch.AddExample(g);
    }
    auto out = dp::ClipPerExample(batch, clip);
    if (!out.ok()) {
      ++failures;
      continue;
    }
    for (size_t r = 0; r < n; ++r) {
      ++rows;
      auto in = batch.example(r);
      auto c = out->example(r);
      // Scale both by max |g| so the checks cannot overflow.
      double s = 0.0;
      for (double x : in) s = std::max(s, std::abs(x));
      if (s == 0.0) {
        ++zero_rows;
        for (double x : c) failures += (x != 0.0);
        continue;
      }
      long double gg = 0, cg = 0, cc = 0;
      for (size_t i = 0; i < dim; ++i) {
        const long double a = in[i] / s, z = c[i] / s;
        if (!std::isfinite(c[i])) ++failures;
        gg += a * a;
        cg += z * a;
        cc += z * z;
      }
      const long double norm_in = std::sqrt(gg) * s;
      const long double norm_out = std::sqrt(cc) * s;
      if (norm_out > clip * (1 + 1e-12)) ++failures;
      // c = f g with f in (0, 1]: the residual of that projection vanishes.
      const long double f = cg / gg;
      long double resid = 0;
      for (size_t i = 0; i < dim; ++i) {
        const long double d = c[i] / s - f * (in[i] / s);
        resid += d * d;
      }
      if (!(f > 0) || f > 1 + 1e-12 || std::sqrt(resid) > 1e-12 * std::sqrt(cc)) {
        ++failures;
      }
      if (norm_in <= clip) {
        for (size_t i = 0; i < dim; ++i) failures += (c[i] != in[i]);
      } else {
        ++clipped;
      }
    }
  }
  return {failures == 0,
          absl::StrFormat("10000 batches, %d rows (%d clipped, %d zero), "
                          "%d failures",
                          rows, clipped, zero_rows, failures)};
}

// 7 ------------------------------------------------------------------------

Outcome GradientChecks() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  double worst_lm = 0.0, worst_clf = 0.0;
  int instances_lm = 0, instances_clf = 0;

  for (int trial = 0; trial < 20; ++trial) {
    lm::ToyLmConfig shape{.vocab_size = static_cast<int>(4 + rng() % 8),
                          .embedding_dim = static_cast<int>(2 + rng() % 3),
                          .context = static_cast<int>(1 + rng() % 3),
                          .hidden = static_cast<int>(2 + rng() % 4)};
    auto model = lm::ToyLmModel::Create(shape);
    if (!model.ok()) return {false, model.status().ToString()};
    for (double& p : model->mutable_parameters()) p = unit(rng);
    lm::TokenSequence seq(3 + rng() % 6);
    for (auto& t : seq) t = static_cast<int32_t>(rng() % shape.vocab_size);

    std::vector<double> analytic(model->num_parameters(), 0.0);
    model->AccumulateGradient(seq, 1.0, analytic);
    std::vector<double> x(model->parameters().begin(), model->parameters().end());
    auto f = [&](const std::vector<double>& p) {
      std::copy(p.begin(), p.end(), model->mutable_parameters().begin());
      return model->SequenceLoss(seq);
    };
    auto numeric = testing::FiniteDifferenceGradient(f, x, 1e-5);
    worst_lm = std::max(worst_lm, testing::RelativeError(analytic, numeric));
    ++instances_lm;
  }

  for (int trial = 0; trial < 20; ++trial) {
    const int bits = 4;
    const int hidden = trial % 2 == 0 ? 0 : static_cast<int>(2 + rng() % 3);
    auto model = classifier::ClassifierModel::Create(bits, hidden);
    if (!model.ok()) return {false, model.status().ToString()};
    for (double& p : model->mutable_parameters()) p = unit(rng);
    classifier::FeatureVector x;
    std::vector<uint32_t> idx(16);
    for (uint32_t i = 0; i < 16; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(2 + rng() % 6);
    std::sort(idx.begin(), idx.end());
    for (uint32_t i : idx) {
      x.indices.push_back(i);
      x.values.push_back(2 * unit(rng));
    }
    const int label = static_cast<int>(rng() % 2);

    std::vector<double> analytic(model->num_parameters(), 0.0);
    auto sparse = model->LossGradient(x, label);
    for (size_t i = 0; i < sparse.index.size(); ++i) {
      analytic[sparse.index[i]] += sparse.value[i];
    }
    std::vector<double> p(model->parameters().begin(), model->parameters().end());
    auto f = [&](const std::vector<double>& q) {
      std::copy(q.begin(), q.end(), model->mutable_parameters().begin());
      return model->Loss(x, label);
    };
    auto numeric = testing::FiniteDifferenceGradient(f, p, 1e-5);
    worst_clf = std::max(worst_clf, testing::RelativeError(analytic, numeric));
    ++instances_clf;
  }
  return {worst_lm <= 1e-4 && worst_clf <= 1e-4,
          absl::StrFormat("toy LM %d instances max rel err %.2e; classifier "
                          "%d instances max rel err %.2e",
                          instances_lm, worst_lm, instances_clf, worst_clf)};
}

// 8 ------------------------------------------------------------------------

// Full sort by (score desc, id asc), then the shortest prefix that reaches
// the budget, serialized independently of the library.
std::string SortAndPrefixJsonl(std::vector<selection::ScoredSequence> items,
                               int64_t budget) {
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.score > b.score || (a.score == b.score && a.id < b.id);
  });
  std::string out;
  int64_t tokens = 0;
  for (const auto& s : items) {
    if (tokens >= budget) break;
    tokens += s.token_count;
    nlohmann::json j;
    j["id"] = s.id;
    j["score"] = s.score;
    j["token_count"] = s.token_count;
    out += j.dump() + "\n";
  }
  return out;
}

Outcome SelectionOracle() {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  size_t largest = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = trial == 0 ? 10000 : 1 + rng() % 10000;
    largest = std::max(largest, n);
    std::vector<uint64_t> ids(n);
    for (size_t i = 0; i < n; ++i) ids[i] = 3 * i + rng() % 3;
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<selection::ScoredSequence> items;
    const bool coarse = trial % 3 == 0;  // many ties
    int64_t total = 0;
    for (size_t i = 0; i < n; ++i) {
      double score = u(rng);
      if (coarse) score = std::floor(score * 8) / 8;
      const int64_t tokens = 1 + static_cast<int64_t>(rng() % 400);
      total += tokens;
      items.push_back({ids[i], score, tokens});
    }
    const int64_t budget =
        1 + static_cast<int64_t>(u(rng) * 1.1 * static_cast<double>(total));
    const std::string expected = SortAndPrefixJsonl(items, budget);
    for (int threads : {1, 4}) {
      auto got = selection::SelectTop(items, budget, threads);
      if (!got.ok() || selection::SelectionToJsonl(*got) != expected) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0,
          absl::StrFormat("100 corpora (largest %d), 1 and 4 threads, "
                          "%d mismatches",
                          largest, mismatches)};
}

// 9 ------------------------------------------------------------------------

pipeline::SyntheticSpec BenchmarkSpec(uint64_t seed) {
  pipeline::SyntheticSpec spec;
  spec.target_train = 1000;
  spec.target_test = 200;
  spec.source_size = 10000;
  spec.target_fraction = 0.1;
  spec.seed = seed;
  return spec;
}

pipeline::PipelineConfig BenchmarkConfig(const fs::path& data, uint64_t seed) {
  pipeline::PipelineConfig c;
  c.target_train_path = (data / "target_train.jsonl").string();
  c.target_test_path = (data / "target_test.jsonl").string();
  c.source_path = (data / "source.jsonl").string();
  c.token_budget_fraction = 0.1;
  c.features.hash_bits = 14;
  c.lm_shape = {.embedding_dim = 16, .context = 4, .hidden = 64};
  c.pretrain.steps = 300;
  c.pretrain.batch_size = 16;
  c.finetune.epochs = 5;
  c.seed = seed;
  return c;
}

Outcome FrameworkBenefit() {
  const auto start = std::chrono::steady_clock::now();
  int selective_wins = 0, both_beat_scratch = 0;
  std::string rows;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const fs::path dir = WorkDir() / absl::StrCat("benchmark_", seed);
    auto corpora = pipeline::GenerateSynthetic(BenchmarkSpec(seed));
    if (!corpora.ok()) return {false, corpora.status().ToString()};
    if (auto s = pipeline::WriteSynthetic(*corpora, dir.string()); !s.ok()) {
      return {false, s.ToString()};
    }
    std::map<pipeline::Mode, double> ppl;
    for (pipeline::Mode mode : {pipeline::Mode::kSelective,
                                pipeline::Mode::kRandom,
                                pipeline::Mode::kNoPretrain}) {
      pipeline::PipelineConfig c = BenchmarkConfig(dir, seed);
      c.mode = mode;
      c.output_dir = (dir / pipeline::ModeName(mode)).string();
      pipeline::RunReport report = pipeline::Run(c);
      if (!report.status.ok()) {
        return {false, absl::StrCat("seed ", seed, " ",
                                    std::string(pipeline::ModeName(mode)), ": ",
                                    report.status.ToString())};
      }
      ppl[mode] = report.evaluation->perplexity;
      AllReports().push_back(std::move(report));
    }
    const double sel = ppl[pipeline::Mode::kSelective];
    const double rnd = ppl[pipeline::Mode::kRandom];
    const double scratch = ppl[pipeline::Mode::kNoPretrain];
    selective_wins += sel < rnd;
    both_beat_scratch += sel < scratch && rnd < scratch;
    absl::StrAppendFormat(&rows, " [%d] %.1f/%.1f/%.1f", seed, sel, rnd, scratch);
  }
  const double secs = Seconds(start);
  return {selective_wins >= 9 && both_beat_scratch == 10 && secs < 900,
          absl::StrFormat("selective<random %d/10, both<no-pretrain %d/10, "
                          "%.0fs; perplexity sel/rand/none:%s",
                          selective_wins, both_beat_scratch, secs, rows)};
}

// 10 -----------------------------------------------------------------------

Outcome DiagnosticsDirection() {
  const auto start = std::chrono::steady_clock::now();
  const int kTrials = 100;
  const size_t n = 600;
  classifier::FeatureConfig features;
  features.hash_bits = 14;
  classifier::ClassifierTrainConfig config;
  const size_t set_size = n * (1 + classifier::kNegativesPerPositive);
  const PrivacyBudget target{0.73, 2.5e-8};
  auto planned = classifier::PlanClassifierPrivacy(n, set_size, config, target);
  if (!planned.ok()) return {false, planned.status().ToString()};
  config.noise_multiplier = planned->mechanism->noise_multiplier;

  int holds = 0;
  int sum_selected = 0, sum_random = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    pipeline::SyntheticSpec spec;
    spec.target_train = static_cast<int>(n);
    spec.target_test = 1;
    spec.source_size = 4000;
    spec.seed = 1000 + trial;
    auto corpora = pipeline::GenerateSynthetic(spec);
    if (!corpora.ok()) return {false, corpora.status().ToString()};
    std::vector<std::string> target_texts, source_texts;
    for (const auto& s : corpora->target_train) target_texts.push_back(s.text);
    for (const auto& s : corpora->source) source_texts.push_back(s.text);

    auto set = classifier::BuildTrainSet(target_texts, source_texts,
                                         SubSeed(spec.seed, "negatives"), features);
    if (!set.ok()) return {false, set.status().ToString()};
    config.seed = SubSeed(spec.seed, "classifier");
    auto trained = classifier::TrainClassifierDp(*set, config, target);
    if (!trained.ok()) return {false, trained.status().ToString()};

    auto scored = selection::ScoreCorpus(trained->model, features, corpora->source);
    int64_t total = 0;
    for (const auto& s : scored) total += s.token_count;
    const int64_t budget = total / 10;
    auto top = selection::SelectTop(scored, budget);
    auto random = selection::RandomBaseline(scored, budget,
                                            SubSeed(spec.seed, "random"));
    if (!top.ok() || !random.ok()) return {false, "selection failed"};

    std::map<uint64_t, const std::string*> by_id;
    for (const auto& s : corpora->source) by_id[s.id] = &s.text;
    auto texts = [&](const selection::SelectionResult& r) {
      std::vector<std::string> out;
      for (const auto& s : r.selected) out.push_back(*by_id.at(s.id));
      return out;
    };
    const auto& exclusions = diagnostics::DefaultExclusionList();
    auto sel = diagnostics::OverlapCount(target_texts, texts(*top), 100, exclusions);
    auto rnd = diagnostics::OverlapCount(target_texts, texts(*random), 100, exclusions);
    if (!sel.ok() || !rnd.ok()) return {false, "overlap failed"};
    holds += sel->count >= rnd->count;
    sum_selected += sel->count;
    sum_random += rnd->count;
  }
  return {holds >= 95,
          absl::StrFormat("selected>=random in %d/%d trials (mean overlap "
                          "%.1f vs %.1f, k=100), %.0fs",
                          holds, kTrials, sum_selected / double(kTrials),
                          sum_random / double(kTrials), Seconds(start))};
}

// 11 -----------------------------------------------------------------------

Outcome PrivacyBookkeeping() {
  int audited = 0, mismatches = 0;
  for (const pipeline::RunReport& report : AllReports()) {
    const auto& p = *report.privacy;
    auto expected = accounting::AdvancedCompose(
        {p.selection.budget, p.finetune.budget, p.delta_slack});
    ++audited;
    if (!expected.ok() || expected->epsilon != p.total.epsilon ||
        expected->delta != p.total.delta || p.total.epsilon > 7.3 ||
        p.total.delta > 1e-7) {
      ++mismatches;
    }
  }
  // The written reports must carry the same numbers.
  for (const auto& entry : fs::recursive_directory_iterator(WorkDir())) {
    if (entry.path().filename() != "report.json") continue;
    std::ifstream in(entry.path());
    auto j = nlohmann::json::parse(in);
    auto stages = j["privacy"]["stages"];
    PrivacyBudget s1{stages[0]["budget"]["epsilon"], stages[0]["budget"]["delta"]};
    PrivacyBudget s2{stages[1]["budget"]["epsilon"], stages[1]["budget"]["delta"]};
    auto expected = accounting::AdvancedCompose(
        {s1, s2, j["privacy"]["delta_slack"].get<double>()});
    ++audited;
    if (!expected.ok() ||
        expected->epsilon != j["privacy"]["total"]["epsilon"].get<double>() ||
        expected->delta != j["privacy"]["total"]["delta"].get<double>()) {
      ++mismatches;
    }
  }

  // Validation must reject any delta split without room for the slack.
  pipeline::PipelineConfig c;
  c.target_train_path = c.target_test_path = c.source_path = "x";
  c.output_dir = "out";
  c.token_budget_fraction = 0.1;
  auto privacy_error = [&](const pipeline::PipelineConfig& cfg) {
    for (const auto& f : pipeline::ValidateConfig(cfg, /*check_paths=*/false)) {
      if (f.severity == pipeline::Finding::Severity::kError &&
          f.key.starts_with("privacy")) {
        return true;
      }
    }
    return false;
  };
  int enforced = 0;
  const int kCases = 3;
  {
    pipeline::PipelineConfig bad = c;
    bad.delta_slack = 0;  // delta1 + delta2 == delta
    bad.delta_selection = bad.delta_finetune = 0.5 * bad.total.delta;
    enforced += privacy_error(bad);
  }
  {
    pipeline::PipelineConfig bad = c;
    bad.delta_selection = 0.6 * bad.total.delta;
    bad.delta_finetune = 0.6 * bad.total.delta;
    bad.delta_slack = 1e-12;
    enforced += privacy_error(bad);
  }
  enforced += !privacy_error(c);  // the default split is accepted
  return {audited > 0 && mismatches == 0 && enforced == kCases,
          absl::StrFormat("%d totals audited (in memory and report.json), %d "
                          "mismatches; delta constraint cases %d/%d",
                          audited, mismatches, enforced, kCases)};
}

}  // namespace
}  // namespace selpt

int main() {
  using selpt::Outcome;
  struct Criterion {
    int number;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "accountant vs analytic Gaussian", selpt::AnalyticGaussian},
      {2, "noise multiplier reproduction", selpt::NoiseMultiplierReproduction},
      {3, "PRV <= RDP dominance", selpt::CrossAccountantDominance},
      {4, "k-fold composition identity", selpt::CompositionIdentity},
      {5, "DP-disabled path equals Adam", selpt::DisabledPathEquivalence},
      {6, "clipping properties", selpt::ClippingProperties},
      {7, "gradient checks", selpt::GradientChecks},
      {8, "selection oracle equivalence", selpt::SelectionOracle},
      {9, "end-to-end framework benefit", selpt::FrameworkBenefit},
      {10, "diagnostics direction", selpt::DiagnosticsDirection},
      {11, "privacy bookkeeping", selpt::PrivacyBookkeeping},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o = c.run();
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  std::error_code ec;
  std::filesystem::remove_all(selpt::WorkDir(), ec);
  return failed == 0 ? 0 : 1;
}
