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


#include "selpt/classifier/train_set.h"

#include "absl/strings/str_cat.h"
#include "selpt/common/random.h"
#include "selpt/common/status_macros.h"

namespace selpt::classifier {

absl::Status ClassifierTrainSet::Validate(bool allow_any_ratio) const {
  if (positives.empty()) {
    return absl::InvalidArgumentError("train set has no positives");
  }
  for (size_t i = 0; i < size(); ++i) {
    absl::Status s = ValidateFeatures(example(i), hash_bits);
    if (!s.ok()) return s;
  }
  if (!allow_any_ratio &&
      negatives.size() != kNegativesPerPositive * positives.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "train set needs ", kNegativesPerPositive * positives.size(),
        " negatives, has ", negatives.size()));
  }
  return absl::OkStatus();
}

absl::StatusOr<ClassifierTrainSet> BuildTrainSet(
    std::span<const std::string> target_texts,
    std::span<const std::string> source_texts, uint64_t seed,
    const FeatureConfig& features) {
  RETURN_IF_ERROR(features.Validate());
  const size_t n = target_texts.size();
  if (n == 0) return absl::InvalidArgumentError("target corpus is empty");
  const size_t wanted = kNegativesPerPositive * n;
  if (source_texts.size() < wanted) {
    return absl::FailedPreconditionError(absl::StrCat(
        "source corpus too small: need ", wanted, " sequences for ", n,
        " targets, have ", source_texts.size()));
  }
  ClassifierTrainSet set;
  set.hash_bits = features.hash_bits;
  set.positives.reserve(n);
  for (const std::string& t : target_texts) {
    set.positives.push_back(Featurize(t, features));
  }
  CounterRng rng(seed);
  set.negative_source_indices =
      SampleWithoutReplacement(source_texts.size(), wanted, rng);
  set.negatives.reserve(wanted);
  for (size_t i : set.negative_source_indices) {
    set.negatives.push_back(Featurize(source_texts[i], features));
  }
  return set;
}

}  // namespace selpt::classifier
