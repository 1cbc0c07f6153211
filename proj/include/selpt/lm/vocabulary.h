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


// Word vocabulary shared by every pre-training mode.

#ifndef SELPT_LM_VOCABULARY_H_
#define SELPT_LM_VOCABULARY_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace selpt::lm {

class Vocabulary {
 public:
  static constexpr int32_t kPadId = 0;
  static constexpr int32_t kUnknownId = 1;

  // Lowercased whitespace tokens seen at least `min_count` times, ordered by
  // count desc then token, truncated to max_size entries including the two
  // reserved ones.
  static absl::StatusOr<Vocabulary> Build(std::span<const std::string> texts,
                                          int max_size, int min_count = 1);
  // tokens[0] and tokens[1] must be the reserved entries.
  static absl::StatusOr<Vocabulary> FromTokens(std::vector<std::string> tokens);

  int32_t Id(std::string_view token) const;
  const std::string& Token(int32_t id) const { return tokens_[id]; }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int32_t> Encode(std::string_view text) const;

  // One token per line.
  absl::Status Save(const std::string& path) const;
  static absl::StatusOr<Vocabulary> Load(const std::string& path);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int32_t> ids_;
};

inline constexpr char kPadToken[] = "<pad>";
inline constexpr char kUnknownToken[] = "<unk>";

}  // namespace selpt::lm

#endif  // SELPT_LM_VOCABULARY_H_
