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


// Budgeted top selection.
//
// Sequences are ranked by (score desc, id asc) and taken until the running
// token total reaches the budget; the sequence that crosses the budget is
// kept. The streaming selector holds only the current winning prefix.

#ifndef SELPT_SELECTION_SELECTOR_H_
#define SELPT_SELECTION_SELECTOR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "selpt/selection/corpus_io.h"
#include "selpt/selection/scoring.h"

namespace selpt::selection {

struct SelectionResult {
  std::vector<ScoredSequence> selected;  // in selection order
  int64_t total_tokens = 0;
  int64_t budget = 0;
  // Score of the last selected sequence; unset for random selection or an
  // empty result.
  std::optional<double> cutoff_score;
  // The corpus held fewer tokens than the budget; everything was selected.
  bool budget_exceeds_corpus = false;

  std::vector<uint64_t> selected_ids() const;
};

// True when a ranks strictly ahead of b.
bool RanksBefore(const ScoredSequence& a, const ScoredSequence& b);

class StreamingSelector {
 public:
  explicit StreamingSelector(int64_t token_budget) : budget_(token_budget) {}

  // Fails on a score outside [0, 1] or a non-positive token count.
  absl::Status Add(const ScoredSequence& item);
  // Folds in another selector's retained items (same budget).
  absl::Status Merge(StreamingSelector&& other);

  absl::StatusOr<SelectionResult> Finish() &&;

  size_t retained() const { return heap_.size(); }

 private:
  void Push(const ScoredSequence& item);

  int64_t budget_;
  int64_t seen_tokens_ = 0;
  int64_t heap_tokens_ = 0;
  // Max-heap on "worse than", so the worst retained item is on top.
  std::vector<ScoredSequence> heap_;
};

// Streaming selection sharded over `threads` workers; deterministic.
absl::StatusOr<SelectionResult> SelectTop(std::span<const ScoredSequence> scored,
                                          int64_t token_budget, int threads = 1);

// Seeded uniform shuffle, then the same prefix-by-budget rule.
absl::StatusOr<SelectionResult> RandomBaseline(
    std::span<const ScoredSequence> corpus, int64_t token_budget,
    uint64_t seed);

// One {"id", "score", "token_count"} object per line.
std::string SelectionToJsonl(const SelectionResult& result);
nlohmann::json SelectionSummary(const SelectionResult& result);

// Selected sequences, in selection order, as a corpus file.
absl::Status MaterializeSelection(const SelectionResult& result,
                                  std::span<const Sequence> corpus,
                                  const std::string& path);

}  // namespace selpt::selection

#endif  // SELPT_SELECTION_SELECTOR_H_
