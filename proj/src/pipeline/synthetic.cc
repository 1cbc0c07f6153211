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


#include "selpt/pipeline/synthetic.h"

#include <cmath>
#include <filesystem>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "selpt/common/status_macros.h"

namespace selpt::pipeline {
namespace {

constexpr const char* kSyllables[] = {"ka", "lo", "mi", "re", "su", "tan",
                                      "vel", "dor", "pi", "ne", "gu", "sha",
                                      "bri", "om", "zel", "fa"};
constexpr const char* kFunctionWords[] = {"the", "of", "and", "to", "in",
                                          "a", "is", "for", "with", "that"};

absl::StatusOr<std::vector<selection::Sequence>> SampleCorpus(
    const MarkovLanguage& language, int count, uint64_t first_id,
    const SyntheticSpec& spec, CounterRng& rng) {
  std::vector<selection::Sequence> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    ASSIGN_OR_RETURN(
        selection::Sequence seq,
        selection::MakeSequence(
            first_id + i,
            language.Sample(spec.sequence_length, spec.function_word_rate,
                            spec.sentence_end_rate, rng)));
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace

absl::Status SyntheticSpec::Validate() const {
  if (target_train < 1 || target_test < 1 || source_size < 1 ||
      sequence_length < 2) {
    return absl::InvalidArgumentError("synthetic corpus sizes must be positive");
  }
  if (!(target_fraction >= 0 && target_fraction <= 1)) {
    return absl::InvalidArgumentError("target_fraction must be in [0, 1]");
  }
  if (target_words < 2 || background_words < 2 || shared_words < 0 ||
      shared_words > background_words) {
    return absl::InvalidArgumentError("invalid synthetic vocabulary sizes");
  }
  if (preferred_successors < 1 || !(transition_sharpness >= 0 &&
                                    transition_sharpness <= 1)) {
    return absl::InvalidArgumentError("invalid synthetic transition settings");
  }
  if (!(function_word_rate >= 0 && function_word_rate < 1) ||
      !(sentence_end_rate >= 0 && sentence_end_rate <= 1)) {
    return absl::InvalidArgumentError("rates must lie in [0, 1)");
  }
  return absl::OkStatus();
}

std::string PseudoWord(int index) {
  constexpr int kBase = std::size(kSyllables);
  // Offset so every word has at least two syllables.
  int n = index + kBase;
  std::string word;
  while (n > 0) {
    word.insert(0, kSyllables[n % kBase]);
    n /= kBase;
  }
  return word;
}

MarkovLanguage::MarkovLanguage(std::vector<std::string> words,
                               int preferred_successors, double sharpness,
                               uint64_t seed)
    : words_(std::move(words)), sharpness_(sharpness) {
  CounterRng rng(seed);
  successors_.resize(words_.size());
  for (auto& next : successors_) {
    for (int k = 0; k < preferred_successors; ++k) {
      next.push_back(static_cast<int>(rng.NextBelow(words_.size())));
    }
  }
}

std::string MarkovLanguage::Sample(int length, double function_word_rate,
                                   double sentence_end_rate,
                                   CounterRng& rng) const {
  std::string out;
  int state = static_cast<int>(rng.NextBelow(words_.size()));
  for (int t = 0; t < length; ++t) {
    if (!out.empty()) out.push_back(' ');
    if (rng.NextUniform() < function_word_rate) {
      out += kFunctionWords[rng.NextBelow(std::size(kFunctionWords))];
      continue;
    }
    out += words_[state];
    if (t + 1 < length && rng.NextUniform() < sentence_end_rate) {
      out += " .";
      ++t;
    }
    const auto& next = successors_[state];
    state = rng.NextUniform() < sharpness_
                ? next[rng.NextBelow(next.size())]
                : static_cast<int>(rng.NextBelow(words_.size()));
  }
  return out;
}

absl::StatusOr<SyntheticCorpora> GenerateSynthetic(const SyntheticSpec& spec) {
  RETURN_IF_ERROR(spec.Validate());
  std::vector<std::string> target_words, background_words;
  for (int i = 0; i < spec.target_words; ++i) target_words.push_back(PseudoWord(i));
  for (int i = 0; i < spec.background_words; ++i) {
    background_words.push_back(PseudoWord(spec.target_words + i));
  }
  std::vector<std::string> target_vocab = target_words;
  target_vocab.insert(target_vocab.end(), background_words.begin(),
                      background_words.begin() + spec.shared_words);
  const MarkovLanguage target(target_vocab, spec.preferred_successors,
                              spec.transition_sharpness,
                              SubSeed(spec.seed, "synthetic-target-chain"));
  const MarkovLanguage background(background_words, spec.preferred_successors,
                                  spec.transition_sharpness,
                                  SubSeed(spec.seed, "synthetic-background-chain"));

  SyntheticCorpora out;
  CounterRng rng(SubSeed(spec.seed, "synthetic-samples"));
  ASSIGN_OR_RETURN(out.target_train,
                   SampleCorpus(target, spec.target_train, 1, spec, rng));
  ASSIGN_OR_RETURN(out.target_test,
                   SampleCorpus(target, spec.target_test, 1, spec, rng));

  const int n_target = static_cast<int>(
      std::lround(spec.target_fraction * spec.source_size));
  std::vector<bool> is_target(spec.source_size, false);
  std::fill(is_target.begin(), is_target.begin() + n_target, true);
  CounterRng shuffle_rng(SubSeed(spec.seed, "synthetic-source-order"));
  Shuffle(is_target, shuffle_rng);
  out.source.reserve(spec.source_size);
  for (int i = 0; i < spec.source_size; ++i) {
    const MarkovLanguage& lang = is_target[i] ? target : background;
    ASSIGN_OR_RETURN(selection::Sequence seq,
                     selection::MakeSequence(
                         i + 1, lang.Sample(spec.sequence_length,
                                            spec.function_word_rate,
                                            spec.sentence_end_rate, rng)));
    out.source.push_back(std::move(seq));
  }
  out.source_is_target = std::move(is_target);
  return out;
}

absl::Status WriteSynthetic(const SyntheticCorpora& corpora,
                            const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::InternalError(absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  const std::filesystem::path base(dir);
  RETURN_IF_ERROR(selection::WriteCorpus((base / "target_train.jsonl").string(),
                                         corpora.target_train));
  RETURN_IF_ERROR(selection::WriteCorpus((base / "target_test.jsonl").string(),
                                         corpora.target_test));
  return selection::WriteCorpus((base / "source.jsonl").string(), corpora.source);
}

}  // namespace selpt::pipeline
