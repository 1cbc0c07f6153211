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


#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "selpt/classifier/classifier_model.h"
#include "selpt/classifier/featurizer.h"
#include "selpt/common/random.h"
#include "selpt/common/text.h"
#include "selpt/selection/corpus_io.h"
#include "selpt/selection/scoring.h"
#include "selpt/selection/selector.h"

namespace selpt::selection {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::string TempPath(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

// Test-only oracle: full sort, then the crossing prefix.
SelectionResult SortAndPrefix(std::vector<ScoredSequence> items,
                              int64_t budget) {
  std::stable_sort(items.begin(), items.end(),
                   [](const ScoredSequence& a, const ScoredSequence& b) {
                     return a.score > b.score ||
                            (a.score == b.score && a.id < b.id);
                   });
  SelectionResult r;
  r.budget = budget;
  int64_t corpus = 0;
  for (const auto& s : items) corpus += s.token_count;
  for (const auto& s : items) {
    if (r.total_tokens >= budget) break;
    r.selected.push_back(s);
    r.total_tokens += s.token_count;
  }
  if (!r.selected.empty()) r.cutoff_score = r.selected.back().score;
  r.budget_exceeds_corpus = corpus < budget;
  return r;
}

std::vector<ScoredSequence> RandomScored(size_t n, CounterRng& rng,
                                         bool coarse) {
  std::vector<ScoredSequence> out;
  std::vector<uint64_t> ids(n);
  for (size_t i = 0; i < n; ++i) ids[i] = i * 7 + rng.NextBelow(7);
  Shuffle(ids, rng);
  for (size_t i = 0; i < n; ++i) {
    double score = rng.NextUniform();
    if (coarse) score = std::floor(score * 10) / 10;
    out.push_back({ids[i], score,
                   static_cast<int64_t>(1 + rng.NextBelow(300))});
  }
  return out;
}

TEST(SequenceTest, FillsTokenCountAndSentences) {
  auto seq = MakeSequence(4, "One two. Three four five!  Six");
  ASSERT_TRUE(seq.ok());
  EXPECT_EQ(seq->token_count, 6);
  EXPECT_THAT(seq->sentences,
              ElementsAre("One two.", "Three four five!", "Six"));
  EXPECT_FALSE(MakeSequence(1, "   ").ok());
  EXPECT_FALSE(MakeSequence(1, "x", 0).ok());
}

TEST(CorpusIoTest, ParsesLines) {
  auto a = ParseSequenceLine(R"({"id": 3, "text": "a b c"})");
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a->id, 3u);
  EXPECT_EQ(a->token_count, 3);
  auto b = ParseSequenceLine(R"({"id": 18446744073709551615, "text": "x", "token_count": 256})");
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(b->id, 18446744073709551615ull);
  EXPECT_EQ(b->token_count, 256);
  EXPECT_FALSE(ParseSequenceLine(R"({"text": "x"})").ok());
  EXPECT_FALSE(ParseSequenceLine(R"({"id": -1, "text": "x"})").ok());
  EXPECT_FALSE(ParseSequenceLine(R"({"id": 1, "text": 5})").ok());
  EXPECT_FALSE(ParseSequenceLine("not json").ok());
}

TEST(CorpusIoTest, RoundTripsAndRejectsDuplicates) {
  std::vector<Sequence> corpus;
  corpus.push_back(*MakeSequence(1, "hello \"world\"."));
  corpus.push_back(*MakeSequence(2, "second line", 9));
  const std::string path = TempPath("corpus.jsonl");
  ASSERT_TRUE(WriteCorpus(path, corpus).ok());
  auto read = ReadCorpus(path);
  ASSERT_TRUE(read.ok());
  ASSERT_EQ(read->size(), 2u);
  EXPECT_EQ((*read)[0].text, "hello \"world\".");
  EXPECT_EQ((*read)[1].token_count, 9);

  ASSERT_TRUE(WriteFileAtomically(
                  path, "{\"id\":1,\"text\":\"a\"}\n\n{\"id\":1,\"text\":\"b\"}\n")
                  .ok());
  auto dup = ReadCorpus(path);
  EXPECT_FALSE(dup.ok());
  EXPECT_THAT(dup.status().message(), HasSubstr("duplicate id 1"));
  ASSERT_TRUE(WriteFileAtomically(path, "{\"id\":1,\"text\":\"a\"}\n{bad\n").ok());
  EXPECT_THAT(ReadCorpus(path).status().message(), HasSubstr(":2:"));
  EXPECT_FALSE(ReadCorpus(TempPath("missing.jsonl")).ok());
}

class ScoringTest : public ::testing::Test {
 protected:
  ScoringTest() : model_(*classifier::ClassifierModel::Create(10, 0)) {
    features_ = {.hash_bits = 10, .bigrams = false, .l2_normalize = false};
    model_.mutable_parameters()[classifier::HashTerm("good", 10)] = 2.0;
    model_.mutable_parameters()[classifier::HashTerm("bad", 10)] = -2.0;
  }
  double Direct(const std::string& text) {
    return classifier::Confidence(model_, classifier::Featurize(text, features_));
  }
  classifier::ClassifierModel model_;
  classifier::FeatureConfig features_;
};

TEST_F(ScoringTest, SingletonEqualsDirectConfidence) {
  auto seq = MakeSequence(1, "good words here");
  EXPECT_EQ(ScoreSequence(model_, features_, *seq).score,
            Direct("good words here"));
}

TEST_F(ScoringTest, TakesMaxOverSentences) {
  auto seq = MakeSequence(1, "bad stuff. good stuff.");
  EXPECT_EQ(ScoreSequence(model_, features_, *seq).score, Direct("good stuff."));
  EXPECT_GT(Direct("good stuff."), Direct("bad stuff."));
}

TEST_F(ScoringTest, AppendingLowSentenceNeverLowers) {
  auto base = MakeSequence(1, "good stuff.");
  auto more = MakeSequence(1, "good stuff. bad bad bad.");
  EXPECT_EQ(ScoreSequence(model_, features_, *more).score,
            ScoreSequence(model_, features_, *base).score);
}

TEST_F(ScoringTest, ParallelScoringMatchesSerial) {
  std::vector<Sequence> corpus;
  CounterRng rng(1);
  const char* words[] = {"good", "bad", "meh", "x"};
  for (int i = 0; i < 57; ++i) {
    std::string text;
    for (int j = 0; j < 8; ++j) {
      text += words[rng.NextBelow(4)];
      text += rng.NextBelow(4) == 0 ? ". " : " ";
    }
    corpus.push_back(*MakeSequence(i, text));
  }
  EXPECT_EQ(ScoreCorpus(model_, features_, corpus, 1),
            ScoreCorpus(model_, features_, corpus, 5));
}

TEST(SelectTopTest, TakesPrefixUntilBudget) {
  std::vector<ScoredSequence> items = {
      {1, 0.9, 256}, {2, 0.8, 256}, {3, 0.7, 256}};
  auto r = SelectTop(items, 512);
  ASSERT_TRUE(r.ok());
  EXPECT_THAT(r->selected_ids(), ElementsAre(1, 2));
  EXPECT_EQ(r->total_tokens, 512);
  EXPECT_EQ(r->cutoff_score, 0.8);
  EXPECT_FALSE(r->budget_exceeds_corpus);
}

TEST(SelectTopTest, IncludesCrossingSequence) {
  std::vector<ScoredSequence> items = {
      {1, 0.9, 256}, {2, 0.8, 256}, {3, 0.7, 256}};
  auto r = SelectTop(items, 300);
  ASSERT_TRUE(r.ok());
  EXPECT_THAT(r->selected_ids(), ElementsAre(1, 2));
  EXPECT_EQ(r->total_tokens, 512);
}

TEST(SelectTopTest, EqualScoresGiveLowestIdPrefix) {
  std::vector<ScoredSequence> items;
  for (uint64_t id : {9, 3, 7, 1, 5}) items.push_back({id, 0.5, 10});
  auto r = SelectTop(items, 30);
  ASSERT_TRUE(r.ok());
  EXPECT_THAT(r->selected_ids(), ElementsAre(1, 3, 5));
}

TEST(SelectTopTest, BudgetAboveCorpusReturnsEverythingFlagged) {
  std::vector<ScoredSequence> items = {{1, 0.1, 5}, {2, 0.2, 5}};
  auto r = SelectTop(items, 100);
  ASSERT_TRUE(r.ok());
  EXPECT_THAT(r->selected_ids(), ElementsAre(2, 1));
  EXPECT_TRUE(r->budget_exceeds_corpus);
}

TEST(SelectTopTest, RejectsBadInput) {
  std::vector<ScoredSequence> items = {{1, 0.1, 5}};
  EXPECT_FALSE(SelectTop(items, 0).ok());
  items[0].score = 1.5;
  EXPECT_FALSE(SelectTop(items, 10).ok());
  items[0].score = NAN;
  EXPECT_FALSE(SelectTop(items, 10).ok());
  items[0] = {1, 0.5, 0};
  EXPECT_FALSE(SelectTop(items, 10).ok());
}

TEST(SelectTopTest, MatchesSortOracleByteForByte) {
  CounterRng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const size_t n = rng.NextBelow(1001);
    auto items = RandomScored(n, rng, trial % 2 == 0);
    int64_t total = 0, longest = 0;
    for (const auto& s : items) {
      total += s.token_count;
      longest = std::max(longest, s.token_count);
    }
    const int64_t budget = 1 + rng.NextBelow(total + 500);
    const SelectionResult expected = SortAndPrefix(items, budget);
    for (int threads : {1, 3}) {
      auto r = SelectTop(items, budget, threads);
      ASSERT_TRUE(r.ok());
      EXPECT_EQ(SelectionToJsonl(*r), SelectionToJsonl(expected));
      EXPECT_EQ(r->total_tokens, expected.total_tokens);
      EXPECT_EQ(r->cutoff_score, expected.cutoff_score);
      EXPECT_EQ(r->budget_exceeds_corpus, expected.budget_exceeds_corpus);
      EXPECT_LT(r->total_tokens, budget + longest);
    }
  }
}

TEST(SelectTopTest, StreamingHoldsOnlyThePrefix) {
  CounterRng rng(3);
  StreamingSelector selector(1000);
  for (uint64_t i = 0; i < 10000; ++i) {
    ASSERT_TRUE(selector.Add({i, rng.NextUniform(), 100}).ok());
  }
  EXPECT_EQ(selector.retained(), 10u);
}

TEST(SelectTopTest, MonotoneTransformKeepsSelection) {
  CounterRng rng(8);
  auto items = RandomScored(500, rng, false);
  auto squashed = items;
  for (auto& s : squashed) s.score = std::pow(s.score, 3.0);
  auto a = SelectTop(items, 5000);
  auto b = SelectTop(squashed, 5000);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->selected_ids(), b->selected_ids());
}

TEST(RandomBaselineTest, WholeCorpusAtFullBudget) {
  std::vector<ScoredSequence> items = {{1, 0.1, 5}, {2, 0.2, 5}, {3, 0.3, 5}};
  auto r = RandomBaseline(items, 15, 1);
  ASSERT_TRUE(r.ok());
  auto ids = r->selected_ids();
  std::sort(ids.begin(), ids.end());
  EXPECT_THAT(ids, ElementsAre(1, 2, 3));
  EXPECT_FALSE(r->budget_exceeds_corpus);
  EXPECT_FALSE(r->cutoff_score.has_value());
}

TEST(RandomBaselineTest, SeedDeterministic) {
  CounterRng rng(4);
  auto items = RandomScored(200, rng, false);
  auto a = RandomBaseline(items, 3000, 11);
  auto b = RandomBaseline(items, 3000, 11);
  auto c = RandomBaseline(items, 3000, 12);
  ASSERT_TRUE(a.ok() && b.ok() && c.ok());
  EXPECT_EQ(SelectionToJsonl(*a), SelectionToJsonl(*b));
  EXPECT_NE(SelectionToJsonl(*a), SelectionToJsonl(*c));
}

TEST(RandomBaselineTest, MeanScoreNeverAboveTopSelection) {
  CounterRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto items = RandomScored(50 + rng.NextBelow(400), rng, trial % 3 == 0);
    const int64_t budget = 1 + rng.NextBelow(20000);
    auto top = SelectTop(items, budget);
    auto random = RandomBaseline(items, budget, trial);
    ASSERT_TRUE(top.ok() && random.ok());
    EXPECT_LE(SelectionSummary(*random)["mean_score"].get<double>(),
              SelectionSummary(*top)["mean_score"].get<double>() + 1e-12);
  }
}

TEST(MaterializeTest, WritesSelectedSequencesInOrder) {
  std::vector<Sequence> corpus = {*MakeSequence(1, "first"),
                                  *MakeSequence(2, "second")};
  SelectionResult r;
  r.selected = {{2, 0.9, 1}, {1, 0.5, 1}};
  const std::string path = TempPath("selected.jsonl");
  ASSERT_TRUE(MaterializeSelection(r, corpus, path).ok());
  auto read = ReadCorpus(path);
  ASSERT_TRUE(read.ok());
  EXPECT_EQ((*read)[0].text, "second");
  EXPECT_EQ((*read)[1].text, "first");
  r.selected.push_back({99, 0.1, 1});
  EXPECT_FALSE(MaterializeSelection(r, corpus, path).ok());
}

}  // namespace
}  // namespace selpt::selection
