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


// Synthetic mixture benchmark: a target language and a background language,
// each a sparse first-order Markov chain over pseudo-words, sharing a set of
// function words. The source corpus mixes a fraction of target-language
// sequences into background sequences.

#ifndef SELPT_PIPELINE_SYNTHETIC_H_
#define SELPT_PIPELINE_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "selpt/common/random.h"
#include "selpt/selection/corpus_io.h"

namespace selpt::pipeline {

struct SyntheticSpec {
  int target_train = 400;
  int target_test = 200;
  int source_size = 4000;
  int sequence_length = 24;
  double target_fraction = 0.1;
  int target_words = 80;
  int background_words = 240;
  // Background words the target chain also uses.
  int shared_words = 40;
  // Chance that a chain steps to one of its preferred successors.
  double transition_sharpness = 0.85;
  int preferred_successors = 3;
  double function_word_rate = 0.2;
  double sentence_end_rate = 0.1;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

struct SyntheticCorpora {
  std::vector<selection::Sequence> target_train;
  std::vector<selection::Sequence> target_test;
  std::vector<selection::Sequence> source;
  std::vector<bool> source_is_target;  // parallel to source
};

// Deterministic pseudo-word for an index ("kalo", "mivelsu", ...).
std::string PseudoWord(int index);

class MarkovLanguage {
 public:
  MarkovLanguage(std::vector<std::string> words, int preferred_successors,
                 double sharpness, uint64_t seed);

  // `length` tokens, with function words and sentence ends interleaved.
  std::string Sample(int length, double function_word_rate,
                     double sentence_end_rate, CounterRng& rng) const;

  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::vector<std::vector<int>> successors_;
  double sharpness_;
};

absl::StatusOr<SyntheticCorpora> GenerateSynthetic(const SyntheticSpec& spec);

// target_train.jsonl, target_test.jsonl and source.jsonl under `dir`.
absl::Status WriteSynthetic(const SyntheticCorpora& corpora,
                            const std::string& dir);

}  // namespace selpt::pipeline

#endif  // SELPT_PIPELINE_SYNTHETIC_H_
