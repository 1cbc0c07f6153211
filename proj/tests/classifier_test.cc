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


#include <cmath>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.h"
#include "selpt/accounting/prv_accountant.h"
#include "selpt/classifier/classifier_model.h"
#include "selpt/classifier/dp_training.h"
#include "selpt/classifier/featurizer.h"
#include "selpt/classifier/train_set.h"
#include "selpt/common/random.h"
#include "selpt/common/text.h"

namespace selpt::classifier {
namespace {

using ::testing::ElementsAre;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sentences over a private word list plus a few shared function words.
std::string Sentence(const std::string& prefix, int vocab, int length,
                     CounterRng& rng) {
  static const char* kShared[] = {"the", "of", "and", "to"};
  std::string out;
  for (int i = 0; i < length; ++i) {
    if (!out.empty()) out.push_back(' ');
    if (rng.NextUniform() < 0.3) {
      out += kShared[rng.NextBelow(4)];
    } else {
      out += absl::StrCat(prefix, rng.NextBelow(vocab));
    }
  }
  return out;
}

std::vector<std::string> Corpus(const std::string& prefix, int n,
                                uint64_t seed) {
  CounterRng rng(seed);
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(Sentence(prefix, 100, 12, rng));
  return out;
}

TEST(FeaturizeTest, RepeatedUnigramCounts) {
  FeatureConfig config{.hash_bits = 18, .bigrams = false, .l2_normalize = false};
  FeatureVector v = Featurize("a a", config);
  ASSERT_EQ(v.indices.size(), 1u);
  EXPECT_EQ(v.indices[0], HashTerm("a", 18));
  EXPECT_THAT(v.values, ElementsAre(2.0));
}

TEST(FeaturizeTest, LowercasesAndAddsBigrams) {
  FeatureConfig config{.hash_bits = 18, .bigrams = true, .l2_normalize = false};
  FeatureVector v = Featurize("  Hello   WORLD ", config);
  std::vector<uint32_t> expected = {HashTerm("hello", 18), HashTerm("world", 18),
                                    HashTerm("hello world", 18)};
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(v.indices, expected);
  EXPECT_TRUE(ValidateFeatures(v, 18).ok());
}

TEST(FeaturizeTest, NormalizedToUnitLength) {
  FeatureVector v = Featurize("x y z x", FeatureConfig{});
  double ss = 0;
  for (double x : v.values) ss += x * x;
  EXPECT_NEAR(ss, 1.0, 1e-12);
}

TEST(FeaturizeTest, DeterministicAndEmptySafe) {
  FeatureConfig config;
  FeatureVector a = Featurize("The cat sat.", config);
  FeatureVector b = Featurize("The cat sat.", config);
  EXPECT_EQ(a.indices, b.indices);
  EXPECT_EQ(a.values, b.values);
  EXPECT_TRUE(Featurize(" \t\n", config).empty());
}

TEST(FeaturizeTest, RejectsBadHashBits) {
  EXPECT_FALSE((FeatureConfig{.hash_bits = 0}.Validate().ok()));
  EXPECT_FALSE((FeatureConfig{.hash_bits = 27}.Validate().ok()));
}

// Pairs of 20-token strings over disjoint halves of a 10^4-type vocabulary.
// Each string has about 39 distinct features, so the birthday estimate of the
// chance that a pair shares any bucket is 1 - exp(-39^2 / 2^18), about 0.6%.
TEST(FeaturizeTest, DisjointVocabularyCollisionRateBelowOnePercent) {
  FeatureConfig config;
  CounterRng rng(2024);
  const int pairs = 5000;
  int colliding = 0;
  double expected = 0;
  for (int p = 0; p < pairs; ++p) {
    std::string a, b;
    for (int i = 0; i < 20; ++i) {
      a += absl::StrCat("w", rng.NextBelow(5000), " ");
      b += absl::StrCat("w", 5000 + rng.NextBelow(5000), " ");
    }
    FeatureVector fa = Featurize(a, config);
    FeatureVector fb = Featurize(b, config);
    std::set<uint32_t> sa(fa.indices.begin(), fa.indices.end());
    bool hit = false;
    for (uint32_t i : fb.indices) hit |= sa.count(i) > 0;
    colliding += hit;
    expected += -std::expm1(-static_cast<double>(fa.indices.size()) *
                            fb.indices.size() / (1 << 18));
  }
  const double rate = static_cast<double>(colliding) / pairs;
  expected /= pairs;
  EXPECT_LT(rate, 0.01);
  EXPECT_NEAR(rate, expected, 4 * std::sqrt(expected / pairs));
}

TEST(TrainSetTest, SizesFollowOneToFive) {
  auto targets = Corpus("t", 100, 1);
  auto source = Corpus("s", 10000, 2);
  auto set = BuildTrainSet(targets, source, 7, FeatureConfig{.hash_bits = 12});
  ASSERT_TRUE(set.ok()) << set.status();
  EXPECT_EQ(set->positives.size(), 100u);
  EXPECT_EQ(set->negatives.size(), 500u);
  EXPECT_EQ(std::set<size_t>(set->negative_source_indices.begin(),
                             set->negative_source_indices.end())
                .size(),
            500u);
  EXPECT_TRUE(set->Validate().ok());
}

TEST(TrainSetTest, SeedDeterministic) {
  auto targets = Corpus("t", 20, 1);
  auto source = Corpus("s", 500, 2);
  auto a = BuildTrainSet(targets, source, 7, FeatureConfig{.hash_bits = 12});
  auto b = BuildTrainSet(targets, source, 7, FeatureConfig{.hash_bits = 12});
  auto c = BuildTrainSet(targets, source, 8, FeatureConfig{.hash_bits = 12});
  ASSERT_TRUE(a.ok() && b.ok() && c.ok());
  EXPECT_EQ(a->negative_source_indices, b->negative_source_indices);
  EXPECT_NE(a->negative_source_indices, c->negative_source_indices);
}

TEST(TrainSetTest, RejectsSmallSourceAndBadRatio) {
  auto targets = Corpus("t", 20, 1);
  auto source = Corpus("s", 99, 2);
  EXPECT_FALSE(BuildTrainSet(targets, source, 7, FeatureConfig{}).ok());
  ClassifierTrainSet set;
  set.positives.resize(2);
  set.negatives.resize(3);
  EXPECT_FALSE(set.Validate().ok());
  EXPECT_TRUE(set.Validate(/*allow_any_ratio=*/true).ok());
}

TEST(PlanSamplingTest, TargetRateIsOneSixthOfBatchFraction) {
  ClassifierTrainConfig config;
  auto plan = PlanSampling(100, 600, config);
  ASSERT_TRUE(plan.ok());
  EXPECT_EQ(plan->expected_batch_size, 3);
  EXPECT_DOUBLE_EQ(plan->sampling_rate, 0.005);
  EXPECT_EQ(plan->steps, 600);
}

ClassifierModel RandomModel(int bits, int hidden, CounterRng& rng) {
  auto model = ClassifierModel::Create(bits, hidden);
  EXPECT_TRUE(model.ok());
  for (double& p : model->mutable_parameters()) p = 0.5 * rng.NextGaussian();
  return *model;
}

FeatureVector RandomFeatures(int bits, CounterRng& rng) {
  std::set<uint32_t> idx;
  const int nnz = 1 + rng.NextBelow(6);
  while (static_cast<int>(idx.size()) < nnz) idx.insert(rng.NextBelow(1u << bits));
  FeatureVector v;
  for (uint32_t i : idx) {
    v.indices.push_back(i);
    v.values.push_back(0.2 + rng.NextUniform());
  }
  return v;
}

std::vector<double> Dense(const SparseGradient& g, size_t n) {
  std::vector<double> out(n, 0.0);
  for (size_t i = 0; i < g.index.size(); ++i) out[g.index[i]] += g.value[i];
  return out;
}

class GradientCheckTest : public ::testing::TestWithParam<int> {};

TEST_P(GradientCheckTest, MatchesFiniteDifferences) {
  const int hidden = GetParam();
  CounterRng rng(100 + hidden);
  for (int trial = 0; trial < 20; ++trial) {
    ClassifierModel model = RandomModel(5, hidden, rng);
    const FeatureVector x = RandomFeatures(5, rng);
    const int label = static_cast<int>(rng.NextBelow(2));
    const std::vector<double> analytic =
        Dense(model.LossGradient(x, label), model.num_parameters());
    std::vector<double> start(model.parameters().begin(),
                              model.parameters().end());
    auto loss = [&](const std::vector<double>& p) {
      std::copy(p.begin(), p.end(), model.mutable_parameters().begin());
      return model.Loss(x, label);
    };
    const std::vector<double> numeric =
        testing::FiniteDifferenceGradient(loss, start, 1e-5);
    EXPECT_LT(testing::RelativeError(analytic, numeric), 1e-5) << trial;
  }
}

INSTANTIATE_TEST_SUITE_P(LinearAndHidden, GradientCheckTest,
                         ::testing::Values(0, 3));

TEST(ConfidenceTest, ZeroVectorScoresAtBias) {
  auto model = ClassifierModel::Create(4, 0);
  ASSERT_TRUE(model.ok());
  model->mutable_parameters().back() = 0.7;
  EXPECT_DOUBLE_EQ(Confidence(*model, FeatureVector{}), Sigmoid(0.7));
}

TEST(ConfidenceTest, PositiveWeightRaisesConfidence) {
  auto model = ClassifierModel::Create(4, 0);
  ASSERT_TRUE(model.ok());
  model->mutable_parameters()[3] = 1.5;
  FeatureVector base{{1}, {1.0}};
  FeatureVector more{{1, 3}, {1.0, 1.0}};
  EXPECT_GT(Confidence(*model, more), Confidence(*model, base));
  EXPECT_EQ(Confidence(*model, more), Confidence(*model, more));
}

TEST(ConfidenceTest, SigmoidStableAtExtremes) {
  EXPECT_EQ(Sigmoid(-1000), 0.0);
  EXPECT_EQ(Sigmoid(1000), 1.0);
  EXPECT_DOUBLE_EQ(Sigmoid(0), 0.5);
}

TEST(PersistenceTest, RoundTripsAndRejectsCorruption) {
  CounterRng rng(5);
  ClassifierModel model = RandomModel(6, 2, rng);
  const std::string path =
      (std::filesystem::path(::testing::TempDir()) / "clf.bin").string();
  ASSERT_TRUE(SaveClassifier(model, path).ok());
  auto loaded = LoadClassifier(path);
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  EXPECT_EQ(loaded->hash_bits(), 6);
  EXPECT_EQ(loaded->hidden_width(), 2);
  EXPECT_TRUE(std::equal(model.parameters().begin(), model.parameters().end(),
                         loaded->parameters().begin()));
  auto bytes = ReadFile(path);
  ASSERT_TRUE(bytes.ok());
  ASSERT_TRUE(WriteFileAtomically(path, bytes->substr(0, bytes->size() - 3)).ok());
  EXPECT_FALSE(LoadClassifier(path).ok());
  ASSERT_TRUE(WriteFileAtomically(path, "NOTAMODELxxxxxxxxxxxxxxxxxxxxx").ok());
  EXPECT_FALSE(LoadClassifier(path).ok());
}

ClassifierTrainSet SeparableSet(int n, uint64_t seed) {
  auto targets = Corpus("t", n, seed);
  auto source = Corpus("s", 5 * n, seed + 1);
  auto set = BuildTrainSet(targets, source, seed + 2,
                           FeatureConfig{.hash_bits = 12});
  EXPECT_TRUE(set.ok());
  return *set;
}

TEST(TrainDpTest, SeparableDataReachesHighF1) {
  ClassifierTrainSet set = SeparableSet(1000, 10);
  ClassifierTrainConfig config;
  config.noise_multiplier = 0.6;
  config.seed = 3;
  auto result = TrainClassifierDp(set, config, {1e6, 1e-6});
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_GE(F1Score(result->model, set), 0.95);
}

TEST(TrainDpTest, CalibratesToTargetAndAccountsExactly) {
  ClassifierTrainSet set = SeparableSet(1000, 20);
  ClassifierTrainConfig config;
  config.seed = 4;
  const accounting::PrivacyBudget target{2.0, 1e-6};
  auto result = TrainClassifierDp(set, config, target);
  ASSERT_TRUE(result.ok()) << result.status();
  const auto& mech = *result->privacy.mechanism;
  EXPECT_DOUBLE_EQ(mech.sampling_rate, 30.0 / 6000.0);
  EXPECT_EQ(mech.steps, 600);
  auto eps = accounting::PrvEpsilon(mech, target.delta);
  ASSERT_TRUE(eps.ok());
  EXPECT_EQ(result->privacy.budget.epsilon, *eps);
  EXPECT_LE(*eps, target.epsilon);
  EXPECT_EQ(result->privacy.budget.delta, target.delta);
  EXPECT_GE(F1Score(result->model, set), 0.8);
}

TEST(TrainDpTest, FixedNoiseOverAllocationIsRejected) {
  ClassifierTrainSet set = SeparableSet(100, 30);
  ClassifierTrainConfig config;
  config.noise_multiplier = 0.4;
  auto result = TrainClassifierDp(set, config, {0.1, 1e-6});
  EXPECT_EQ(result.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(TrainDpTest, DisabledDpMatchesNonPrivateLogisticRegression) {
  ClassifierTrainSet set = SeparableSet(200, 40);
  ClassifierTrainConfig config;
  config.noise_multiplier = 0.0;
  config.clip_norm = kInf;
  config.epochs = 20;
  config.seed = 5;
  auto result = TrainClassifierDp(set, config, {1.0, 1e-6});
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_TRUE(std::isinf(result->privacy.budget.epsilon));

  // Full-batch non-private Adam on the same objective.
  auto reference = ClassifierModel::Create(12, 0);
  ASSERT_TRUE(reference.ok());
  auto adam = dp::AdamState::Create(reference->num_parameters(),
                                    {.learning_rate = 0.05});
  ASSERT_TRUE(adam.ok());
  for (int step = 0; step < 2000; ++step) {
    std::vector<double> grad(reference->num_parameters(), 0.0);
    for (size_t i = 0; i < set.size(); ++i) {
      SparseGradient g = reference->LossGradient(set.example(i), set.label(i));
      for (size_t n = 0; n < g.index.size(); ++n) {
        grad[g.index[n]] += g.value[n] / set.size();
      }
    }
    ASSERT_TRUE(
        dp::ApplyAdam(*adam, grad, reference->mutable_parameters()).ok());
  }
  const double dp_loss = MeanLoss(result->model, set);
  const double ref_loss = MeanLoss(*reference, set);
  EXPECT_NEAR(dp_loss, ref_loss, 0.02);
  int agree = 0;
  for (size_t i = 0; i < set.size(); ++i) {
    agree += (result->model.Score(set.example(i)) > 0) ==
             (reference->Score(set.example(i)) > 0);
  }
  EXPECT_GE(agree, static_cast<int>(0.99 * set.size()));
}

TEST(TrainDpTest, SameSeedSameModel) {
  ClassifierTrainSet set = SeparableSet(100, 50);
  ClassifierTrainConfig config;
  config.noise_multiplier = 1.0;
  config.seed = 9;
  auto a = TrainClassifierDp(set, config, {1e3, 1e-6});
  auto b = TrainClassifierDp(set, config, {1e3, 1e-6});
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_TRUE(std::equal(a->model.parameters().begin(),
                         a->model.parameters().end(),
                         b->model.parameters().begin()));
}

}  // namespace
}  // namespace selpt::classifier
