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

#ifndef SELPT_COMMON_TEXT_H_
#define SELPT_COMMON_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace selpt {

// 64-bit FNV-1a. Stable across platforms; used for feature hashing and
// content fingerprints.
uint64_t Fnv1a64(std::string_view data, uint64_t basis = 0xcbf29ce484222325ULL);

std::string LowercaseAscii(std::string_view text);

// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string_view> SplitWhitespace(std::string_view text);

// Sentence splitter used by the sentence-max scoring rule: a sentence ends at
// '.', '!' or '?' when followed by whitespace (or at end of text). Pieces are
// trimmed; empty pieces are dropped. Never returns an empty list for text
// containing a non-space character.
std::vector<std::string> SplitSentences(std::string_view text);

absl::StatusOr<std::string> ReadFile(const std::string& path);
// Writes to `path`.tmp and renames over `path`.
absl::Status WriteFileAtomically(const std::string& path,
                                 std::string_view contents);

}  // namespace selpt

#endif  // SELPT_COMMON_TEXT_H_
