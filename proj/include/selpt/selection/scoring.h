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


// Sentence-max scoring of source sequences.

#ifndef SELPT_SELECTION_SCORING_H_
#define SELPT_SELECTION_SCORING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "selpt/classifier/classifier_model.h"
#include "selpt/classifier/featurizer.h"
#include "selpt/selection/corpus_io.h"

namespace selpt::selection {

struct ScoredSequence {
  uint64_t id = 0;
  double score = 0.0;  // in [0, 1]
  int64_t token_count = 0;

  friend bool operator==(const ScoredSequence&, const ScoredSequence&) = default;
};

// Maximum classifier confidence over the sequence's sentences.
ScoredSequence ScoreSequence(const classifier::ClassifierModel& model,
                             const classifier::FeatureConfig& features,
                             const Sequence& seq);

// Scores in input order. Sharded over `threads` workers; the output does not
// depend on the thread count.
std::vector<ScoredSequence> ScoreCorpus(
    const classifier::ClassifierModel& model,
    const classifier::FeatureConfig& features, std::span<const Sequence> corpus,
    int threads = 1);

}  // namespace selpt::selection

#endif  // SELPT_SELECTION_SCORING_H_
