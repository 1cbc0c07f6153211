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


#include "selpt/selection/scoring.h"

#include <algorithm>

#include "selpt/common/threads.h"

namespace selpt::selection {

ScoredSequence ScoreSequence(const classifier::ClassifierModel& model,
                             const classifier::FeatureConfig& features,
                             const Sequence& seq) {
  double best = 0.0;
  bool first = true;
  for (const std::string& sentence : seq.sentences) {
    const double c =
        classifier::Confidence(model, classifier::Featurize(sentence, features));
    if (first || c > best) best = c;
    first = false;
  }
  if (first) {
    best = classifier::Confidence(model, classifier::Featurize(seq.text, features));
  }
  return {seq.id, best, seq.token_count};
}

std::vector<ScoredSequence> ScoreCorpus(
    const classifier::ClassifierModel& model,
    const classifier::FeatureConfig& features, std::span<const Sequence> corpus,
    int threads) {
  std::vector<ScoredSequence> out(corpus.size());
  ParallelShards(corpus.size(), threads,
                 [&](size_t, size_t begin, size_t end) {
                   for (size_t i = begin; i < end; ++i) {
                     out[i] = ScoreSequence(model, features, corpus[i]);
                   }
                 });
  return out;
}

}  // namespace selpt::selection
