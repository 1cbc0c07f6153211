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


// Positive/negative training data for the domain classifier.

#ifndef SELPT_CLASSIFIER_TRAIN_SET_H_
#define SELPT_CLASSIFIER_TRAIN_SET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "selpt/classifier/featurizer.h"

namespace selpt::classifier {

inline constexpr size_t kNegativesPerPositive = 5;

struct ClassifierTrainSet {
  int hash_bits = 18;
  std::vector<FeatureVector> positives;  // label 1
  std::vector<FeatureVector> negatives;  // label 0
  // Source positions the negatives were drawn from, in draw order.
  std::vector<size_t> negative_source_indices;

  size_t size() const { return positives.size() + negatives.size(); }
  const FeatureVector& example(size_t i) const {
    return i < positives.size() ? positives[i] : negatives[i - positives.size()];
  }
  int label(size_t i) const { return i < positives.size() ? 1 : 0; }

  // Checks the 1:5 ratio unless `allow_any_ratio`.
  absl::Status Validate(bool allow_any_ratio = false) const;
};

// All targets become positives; 5N source texts, drawn uniformly without
// replacement under `seed`, become negatives.
absl::StatusOr<ClassifierTrainSet> BuildTrainSet(
    std::span<const std::string> target_texts,
    std::span<const std::string> source_texts, uint64_t seed,
    const FeatureConfig& features);

}  // namespace selpt::classifier

#endif  // SELPT_CLASSIFIER_TRAIN_SET_H_
