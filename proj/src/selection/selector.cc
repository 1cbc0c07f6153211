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


#include "selpt/selection/selector.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "selpt/common/random.h"
#include "selpt/common/status_macros.h"
#include "selpt/common/text.h"
#include "selpt/common/threads.h"

namespace selpt::selection {
namespace {

absl::Status CheckItem(const ScoredSequence& item) {
  if (!(item.score >= 0.0 && item.score <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("score of sequence ", item.id, " is outside [0, 1]"));
  }
  if (item.token_count < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("sequence ", item.id, " has token_count < 1"));
  }
  return absl::OkStatus();
}

absl::Status CheckBudget(int64_t budget) {
  if (budget < 1) return absl::InvalidArgumentError("token budget must be >= 1");
  return absl::OkStatus();
}

}  // namespace

std::vector<uint64_t> SelectionResult::selected_ids() const {
  std::vector<uint64_t> ids;
  ids.reserve(selected.size());
  for (const ScoredSequence& s : selected) ids.push_back(s.id);
  return ids;
}

bool RanksBefore(const ScoredSequence& a, const ScoredSequence& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

void StreamingSelector::Push(const ScoredSequence& item) {
  heap_.push_back(item);
  std::push_heap(heap_.begin(), heap_.end(), RanksBefore);
  heap_tokens_ += item.token_count;
  // Drop the worst item while the rest still reaches the budget.
  while (!heap_.empty() && heap_tokens_ - heap_.front().token_count >= budget_) {
    heap_tokens_ -= heap_.front().token_count;
    std::pop_heap(heap_.begin(), heap_.end(), RanksBefore);
    heap_.pop_back();
  }
}

absl::Status StreamingSelector::Add(const ScoredSequence& item) {
  RETURN_IF_ERROR(CheckBudget(budget_));
  RETURN_IF_ERROR(CheckItem(item));
  seen_tokens_ += item.token_count;
  Push(item);
  return absl::OkStatus();
}

absl::Status StreamingSelector::Merge(StreamingSelector&& other) {
  if (other.budget_ != budget_) {
    return absl::InvalidArgumentError("cannot merge selectors with different budgets");
  }
  seen_tokens_ += other.seen_tokens_;
  for (const ScoredSequence& item : other.heap_) Push(item);
  other.heap_.clear();
  other.heap_tokens_ = 0;
  other.seen_tokens_ = 0;
  return absl::OkStatus();
}

absl::StatusOr<SelectionResult> StreamingSelector::Finish() && {
  RETURN_IF_ERROR(CheckBudget(budget_));
  SelectionResult result;
  result.budget = budget_;
  result.selected = std::move(heap_);
  std::sort(result.selected.begin(), result.selected.end(), RanksBefore);
  result.total_tokens = heap_tokens_;
  result.budget_exceeds_corpus = seen_tokens_ < budget_;
  if (!result.selected.empty()) result.cutoff_score = result.selected.back().score;
  return result;
}

absl::StatusOr<SelectionResult> SelectTop(std::span<const ScoredSequence> scored,
                                          int64_t token_budget, int threads) {
  RETURN_IF_ERROR(CheckBudget(token_budget));
  const size_t shards = std::max<size_t>(1, ShardCount(scored.size(), threads));
  std::vector<StreamingSelector> local(shards, StreamingSelector(token_budget));
  std::vector<absl::Status> status(shards);
  ParallelShards(scored.size(), threads,
                 [&](size_t shard, size_t begin, size_t end) {
                   for (size_t i = begin; i < end && status[shard].ok(); ++i) {
                     status[shard] = local[shard].Add(scored[i]);
                   }
                 });
  for (const absl::Status& s : status) RETURN_IF_ERROR(s);
  StreamingSelector merged(token_budget);
  for (StreamingSelector& s : local) RETURN_IF_ERROR(merged.Merge(std::move(s)));
  return std::move(merged).Finish();
}

absl::StatusOr<SelectionResult> RandomBaseline(
    std::span<const ScoredSequence> corpus, int64_t token_budget,
    uint64_t seed) {
  RETURN_IF_ERROR(CheckBudget(token_budget));
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), size_t{0});
  CounterRng rng(seed);
  Shuffle(order, rng);
  SelectionResult result;
  result.budget = token_budget;
  for (size_t i : order) {
    if (result.total_tokens >= token_budget) break;
    RETURN_IF_ERROR(CheckItem(corpus[i]));
    result.selected.push_back(corpus[i]);
    result.total_tokens += corpus[i].token_count;
  }
  result.budget_exceeds_corpus = result.total_tokens < token_budget;
  return result;
}

std::string SelectionToJsonl(const SelectionResult& result) {
  std::string out;
  for (const ScoredSequence& s : result.selected) {
    nlohmann::json j = {
        {"id", s.id}, {"score", s.score}, {"token_count", s.token_count}};
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

nlohmann::json SelectionSummary(const SelectionResult& result) {
  nlohmann::json j;
  j["num_selected"] = result.selected.size();
  j["total_tokens"] = result.total_tokens;
  j["budget"] = result.budget;
  j["cutoff_score"] = result.cutoff_score.has_value()
                          ? nlohmann::json(*result.cutoff_score)
                          : nlohmann::json();
  j["budget_exceeds_corpus"] = result.budget_exceeds_corpus;
  double mean = 0;
  for (const ScoredSequence& s : result.selected) mean += s.score;
  j["mean_score"] =
      result.selected.empty() ? 0.0 : mean / result.selected.size();
  return j;
}

absl::Status MaterializeSelection(const SelectionResult& result,
                                  std::span<const Sequence> corpus,
                                  const std::string& path) {
  std::unordered_map<uint64_t, const Sequence*> by_id;
  by_id.reserve(corpus.size());
  for (const Sequence& seq : corpus) by_id.emplace(seq.id, &seq);
  std::string out;
  for (const ScoredSequence& s : result.selected) {
    auto it = by_id.find(s.id);
    if (it == by_id.end()) {
      return absl::NotFoundError(
          absl::StrCat("selected id ", s.id, " is not in the corpus"));
    }
    out += SequenceToJsonLine(*it->second);
    out.push_back('\n');
  }
  return WriteFileAtomically(path, out);
}

}  // namespace selpt::selection
