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


#include "selpt/classifier/featurizer.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "absl/strings/str_cat.h"
#include "selpt/common/random.h"
#include "selpt/common/text.h"

namespace selpt::classifier {

absl::Status FeatureConfig::Validate() const {
  if (hash_bits < 1 || hash_bits > 26) {
    return absl::InvalidArgumentError(
        absl::StrCat("hash_bits must be in [1, 26], got ", hash_bits));
  }
  return absl::OkStatus();
}

uint32_t HashTerm(std::string_view term, int hash_bits) {
  const uint64_t mask = (uint64_t{1} << hash_bits) - 1;
  return static_cast<uint32_t>(Mix64(Fnv1a64(term)) & mask);
}

FeatureVector Featurize(std::string_view text, const FeatureConfig& config) {
  const std::string lowered = LowercaseAscii(text);
  const std::vector<std::string_view> tokens = SplitWhitespace(lowered);
  std::vector<uint32_t> buckets;
  buckets.reserve(tokens.size() * (config.bigrams ? 2 : 1));
  for (std::string_view t : tokens) {
    buckets.push_back(HashTerm(t, config.hash_bits));
  }
  if (config.bigrams) {
    std::string joined;
    for (size_t i = 1; i < tokens.size(); ++i) {
      joined.assign(tokens[i - 1]);
      joined.push_back(' ');
      joined.append(tokens[i]);
      buckets.push_back(HashTerm(joined, config.hash_bits));
    }
  }
  std::sort(buckets.begin(), buckets.end());

  FeatureVector out;
  for (size_t i = 0; i < buckets.size();) {
    size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    out.indices.push_back(buckets[i]);
    out.values.push_back(static_cast<double>(j - i));
    i = j;
  }
  if (config.l2_normalize && !out.empty()) {
    double ss = 0;
    for (double v : out.values) ss += v * v;
    const double inv = 1.0 / std::sqrt(ss);
    for (double& v : out.values) v *= inv;
  }
  return out;
}

absl::Status ValidateFeatures(const FeatureVector& features, int hash_bits) {
  if (features.indices.size() != features.values.size()) {
    return absl::InvalidArgumentError("feature index/value length mismatch");
  }
  const uint64_t limit = uint64_t{1} << hash_bits;
  for (size_t i = 0; i < features.indices.size(); ++i) {
    if (features.indices[i] >= limit ||
        (i > 0 && features.indices[i] <= features.indices[i - 1])) {
      return absl::InvalidArgumentError(
          "feature indices must be increasing and below 2^hash_bits");
    }
    if (!(features.values[i] > 0) || !std::isfinite(features.values[i])) {
      return absl::InvalidArgumentError("feature values must be positive");
    }
  }
  return absl::OkStatus();
}

}  // namespace selpt::classifier
