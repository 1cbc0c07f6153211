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


#include "selpt/diagnostics/term_overlap.h"

#include <algorithm>
#include <cctype>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "selpt/common/status_macros.h"
#include "selpt/common/text.h"

namespace selpt::diagnostics {
namespace {

bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }

}  // namespace

const ExclusionList& DefaultExclusionList() {
  static const ExclusionList* const kList = new ExclusionList{
      // determiners and quantifiers
      "a", "an", "the", "this", "that", "these", "those", "some", "any", "each",
      "every", "no", "all", "both", "either", "neither", "such", "other",
      "another", "much", "many", "more", "most", "few", "less", "least",
      // pronouns
      "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself",
      "he", "him", "his", "himself", "she", "her", "hers", "herself", "it",
      "its", "itself", "we", "us", "our", "ours", "ourselves", "they", "them",
      "their", "theirs", "themselves", "who", "whom", "whose", "which", "what",
      "whatever", "whoever", "someone", "something", "anyone", "anything",
      "everyone", "everything", "nobody", "nothing",
      // prepositions
      "about", "above", "across", "after", "against", "along", "among",
      "around", "at", "before", "behind", "below", "beneath", "beside",
      "between", "beyond", "by", "down", "during", "except", "for", "from",
      "in", "inside", "into", "near", "of", "off", "on", "onto", "out",
      "outside", "over", "past", "since", "through", "throughout", "to",
      "toward", "towards", "under", "until", "up", "upon", "with", "within",
      "without", "via",
      // auxiliaries and modals
      "am", "is", "are", "was", "were", "be", "been", "being", "have", "has",
      "had", "having", "do", "does", "did", "doing", "will", "would", "shall",
      "should", "can", "could", "may", "might", "must", "ought",
      // conjunctions, particles, adverbs of degree
      "and", "or", "but", "nor", "so", "yet", "if", "then", "than", "because",
      "while", "when", "where", "whether", "although", "though", "as", "not",
      "also", "just", "only", "very", "too", "there", "here", "how", "why",
      "now", "again", "once", "s", "t", "re", "ll", "ve", "d", "m"};
  return *kList;
}

uint64_t ExclusionListHash(const ExclusionList& exclusions) {
  std::string joined;
  for (const std::string& t : exclusions) {
    joined += t;
    joined.push_back('\n');
  }
  return Fnv1a64(joined);
}

std::string NormalizeTerm(std::string_view token) {
  size_t begin = 0, end = token.size();
  while (begin < end && !IsAlnum(token[begin])) ++begin;
  while (end > begin && !IsAlnum(token[end - 1])) --end;
  return LowercaseAscii(token.substr(begin, end - begin));
}

TermFrequencyTable CountTerms(std::span<const std::string> texts,
                              const ExclusionList& exclusions) {
  TermFrequencyTable table;
  for (const std::string& text : texts) {
    for (std::string_view token : SplitWhitespace(text)) {
      std::string term = NormalizeTerm(token);
      if (term.empty() || exclusions.count(term) > 0) continue;
      ++table.counts[std::move(term)];
    }
  }
  return table;
}

absl::StatusOr<TopTerms> TopKTerms(const TermFrequencyTable& table, int k) {
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  std::vector<std::pair<std::string, int64_t>> entries(table.counts.begin(),
                                                       table.counts.end());
  const size_t keep = std::min(entries.size(), static_cast<size_t>(k));
  // Entries arrive sorted by term, so a stable sort on count keeps ties
  // lexicographic.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  TopTerms top;
  top.short_of_k = entries.size() < static_cast<size_t>(k);
  for (size_t i = 0; i < keep; ++i) top.terms.push_back(entries[i].first);
  return top;
}

absl::StatusOr<TopTerms> TopKTerms(std::span<const std::string> texts, int k,
                                   const ExclusionList& exclusions) {
  return TopKTerms(CountTerms(texts, exclusions), k);
}

absl::StatusOr<Overlap> OverlapCount(std::span<const std::string> a,
                                     std::span<const std::string> b, int k,
                                     const ExclusionList& exclusions) {
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError("overlap needs two non-empty corpora");
  }
  ASSIGN_OR_RETURN(TopTerms ta, TopKTerms(a, k, exclusions));
  ASSIGN_OR_RETURN(TopTerms tb, TopKTerms(b, k, exclusions));
  const std::set<std::string> sa(ta.terms.begin(), ta.terms.end());
  Overlap out;
  for (const std::string& t : tb.terms) out.count += sa.count(t) > 0;
  out.short_of_k = ta.short_of_k || tb.short_of_k;
  return out;
}

absl::StatusOr<nlohmann::json> DiagnosticReport(
    std::span<const std::string> target, std::span<const std::string> source,
    const std::map<std::string, std::vector<std::string>>& subsets, int k,
    const ExclusionList& exclusions) {
  if (target.empty() || source.empty()) {
    return absl::InvalidArgumentError("diagnostics need non-empty corpora");
  }
  nlohmann::json j;
  j["k"] = k;
  j["exclusion_list_hash"] =
      absl::StrFormat("%016x", ExclusionListHash(exclusions));
  j["exclusion_list_size"] = exclusions.size();
  ASSIGN_OR_RETURN(TopTerms t_top, TopKTerms(target, k, exclusions));
  ASSIGN_OR_RETURN(TopTerms s_top, TopKTerms(source, k, exclusions));
  const std::set<std::string> t_set(t_top.terms.begin(), t_top.terms.end());
  auto overlap = [&](const TopTerms& other) {
    int n = 0;
    for (const std::string& term : other.terms) n += t_set.count(term) > 0;
    return n;
  };
  j["top_terms"]["target"] = t_top.terms;
  j["top_terms"]["source"] = s_top.terms;
  j["overlap"]["target_source"] = overlap(s_top);
  bool short_of_k = t_top.short_of_k || s_top.short_of_k;
  for (const auto& [name, texts] : subsets) {
    if (texts.empty()) {
      j["top_terms"][name] = nlohmann::json::array();
      j["overlap"][absl::StrCat("target_", name)] = 0;
      continue;
    }
    ASSIGN_OR_RETURN(TopTerms top, TopKTerms(texts, k, exclusions));
    j["top_terms"][name] = top.terms;
    j["overlap"][absl::StrCat("target_", name)] = overlap(top);
    short_of_k |= top.short_of_k;
  }
  j["short_of_k"] = short_of_k;
  return j;
}

}  // namespace selpt::diagnostics
