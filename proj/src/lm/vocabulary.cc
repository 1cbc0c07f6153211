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


#include "selpt/lm/vocabulary.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "selpt/common/status_macros.h"
#include "selpt/common/text.h"

namespace selpt::lm {

absl::StatusOr<Vocabulary> Vocabulary::Build(std::span<const std::string> texts,
                                             int max_size, int min_count) {
  if (max_size < 3) {
    return absl::InvalidArgumentError("vocabulary max_size must be >= 3");
  }
  std::map<std::string, int64_t> counts;
  for (const std::string& text : texts) {
    const std::string lowered = LowercaseAscii(text);
    for (std::string_view t : SplitWhitespace(lowered)) ++counts[std::string(t)];
  }
  counts.erase(kPadToken);
  counts.erase(kUnknownToken);
  std::vector<std::pair<std::string, int64_t>> entries;
  for (auto& [token, count] : counts) {
    if (count >= min_count) entries.emplace_back(token, count);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens = {kPadToken, kUnknownToken};
  for (const auto& [token, count] : entries) {
    if (static_cast<int>(tokens.size()) >= max_size) break;
    tokens.push_back(token);
  }
  return FromTokens(std::move(tokens));
}

absl::StatusOr<Vocabulary> Vocabulary::FromTokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnknownToken) {
    return absl::InvalidArgumentError("vocabulary must start with <pad>, <unk>");
  }
  Vocabulary v;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty() ||
        tokens[i].find_first_of(" \t\n\r\f\v") != std::string::npos) {
      return absl::InvalidArgumentError("vocabulary tokens must be non-empty words");
    }
    if (!v.ids_.emplace(tokens[i], static_cast<int32_t>(i)).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate vocabulary token ", tokens[i]));
    }
  }
  v.tokens_ = std::move(tokens);
  return v;
}

int32_t Vocabulary::Id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnknownId : it->second;
}

std::vector<int32_t> Vocabulary::Encode(std::string_view text) const {
  const std::string lowered = LowercaseAscii(text);
  std::vector<int32_t> out;
  for (std::string_view t : SplitWhitespace(lowered)) out.push_back(Id(t));
  return out;
}

absl::Status Vocabulary::Save(const std::string& path) const {
  std::string out;
  for (const std::string& t : tokens_) {
    out += t;
    out.push_back('\n');
  }
  return WriteFileAtomically(path, out);
}

absl::StatusOr<Vocabulary> Vocabulary::Load(const std::string& path) {
  ASSIGN_OR_RETURN(std::string data, ReadFile(path));
  std::vector<std::string> tokens;
  std::istringstream in(data);
  for (std::string line; std::getline(in, line);) tokens.push_back(line);
  return FromTokens(std::move(tokens));
}

}  // namespace selpt::lm
