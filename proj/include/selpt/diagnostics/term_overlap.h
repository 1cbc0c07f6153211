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


// Frequent-term overlap between corpora.
//
// Terms are lowercased whitespace tokens with leading and trailing
// non-alphanumeric characters stripped. Nouns are approximated by dropping
// a fixed list of function words.

#ifndef SELPT_DIAGNOSTICS_TERM_OVERLAP_H_
#define SELPT_DIAGNOSTICS_TERM_OVERLAP_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace selpt::diagnostics {

using ExclusionList = std::set<std::string>;

// Prepositions, auxiliaries, pronouns, determiners and similar.
const ExclusionList& DefaultExclusionList();

// FNV-1a over the sorted terms joined by '\n'.
uint64_t ExclusionListHash(const ExclusionList& exclusions);

// Empty when nothing alphanumeric remains.
std::string NormalizeTerm(std::string_view token);

struct TermFrequencyTable {
  std::map<std::string, int64_t> counts;  // every count >= 1
};

TermFrequencyTable CountTerms(std::span<const std::string> texts,
                              const ExclusionList& exclusions);

struct TopTerms {
  std::vector<std::string> terms;  // by count desc, then lexicographic
  // Fewer than k distinct terms were available.
  bool short_of_k = false;
};

absl::StatusOr<TopTerms> TopKTerms(const TermFrequencyTable& table, int k);
absl::StatusOr<TopTerms> TopKTerms(std::span<const std::string> texts, int k,
                                   const ExclusionList& exclusions);

struct Overlap {
  int count = 0;
  bool short_of_k = false;  // either side had fewer than k terms
};

// |top_k(a) ∩ top_k(b)|. Both corpora must be non-empty.
absl::StatusOr<Overlap> OverlapCount(std::span<const std::string> a,
                                     std::span<const std::string> b, int k,
                                     const ExclusionList& exclusions);

// k, the exclusion hash, top-k lists and overlaps of the target with the
// source and with each selected subset (keyed by name, e.g. "selected").
absl::StatusOr<nlohmann::json> DiagnosticReport(
    std::span<const std::string> target, std::span<const std::string> source,
    const std::map<std::string, std::vector<std::string>>& subsets, int k,
    const ExclusionList& exclusions);

}  // namespace selpt::diagnostics

#endif  // SELPT_DIAGNOSTICS_TERM_OVERLAP_H_
