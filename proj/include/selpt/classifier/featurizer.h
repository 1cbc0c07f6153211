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


// Hashed word n-gram features.

#ifndef SELPT_CLASSIFIER_FEATURIZER_H_
#define SELPT_CLASSIFIER_FEATURIZER_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "absl/status/status.h"

namespace selpt::classifier {

struct FeatureConfig {
  int hash_bits = 18;
  bool bigrams = true;
  // Scale each vector to unit Euclidean norm. Off gives raw counts.
  bool l2_normalize = true;

  absl::Status Validate() const;
};

struct FeatureVector {
  std::vector<uint32_t> indices;  // strictly increasing, < 2^hash_bits
  std::vector<double> values;     // positive

  bool empty() const { return indices.empty(); }
};

// Bucket of a unigram or of a bigram (two tokens joined by a space).
uint32_t HashTerm(std::string_view term, int hash_bits);

// Lowercases, splits on whitespace and hashes unigrams (and bigrams). Text
// with no tokens yields the empty vector.
FeatureVector Featurize(std::string_view text, const FeatureConfig& config);

absl::Status ValidateFeatures(const FeatureVector& features, int hash_bits);

}  // namespace selpt::classifier

#endif  // SELPT_CLASSIFIER_FEATURIZER_H_
