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


// JSON-lines corpora: one object per line with "id", "text" and an optional
// "token_count" (whitespace tokens when absent).

#ifndef SELPT_SELECTION_CORPUS_IO_H_
#define SELPT_SELECTION_CORPUS_IO_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace selpt::selection {

struct Sequence {
  uint64_t id = 0;
  std::string text;
  int64_t token_count = 0;
  std::vector<std::string> sentences;  // never empty for a valid sequence
};

// Fills token_count (if not given) and sentences. Fails on text without
// tokens or a non-positive token_count.
absl::StatusOr<Sequence> MakeSequence(uint64_t id, std::string text,
                                      std::optional<int64_t> token_count = {});

absl::StatusOr<Sequence> ParseSequenceLine(std::string_view line);
std::string SequenceToJsonLine(const Sequence& seq);

// Streams a corpus file. Blank lines are skipped; errors carry line numbers.
absl::Status ForEachSequence(
    const std::string& path,
    const std::function<absl::Status(Sequence)>& visit);

// Loads a whole corpus; ids must be unique.
absl::StatusOr<std::vector<Sequence>> ReadCorpus(const std::string& path);

absl::Status WriteCorpus(const std::string& path,
                         std::span<const Sequence> corpus);

}  // namespace selpt::selection

#endif  // SELPT_SELECTION_CORPUS_IO_H_
