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


#include "selpt/selection/corpus_io.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "selpt/common/status_macros.h"
#include "selpt/common/text.h"

namespace selpt::selection {

absl::StatusOr<Sequence> MakeSequence(uint64_t id, std::string text,
                                      std::optional<int64_t> token_count) {
  const int64_t words = static_cast<int64_t>(SplitWhitespace(text).size());
  if (words == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("sequence ", id, " has no tokens"));
  }
  Sequence seq;
  seq.id = id;
  seq.token_count = token_count.value_or(words);
  if (seq.token_count < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("sequence ", id, " has token_count < 1"));
  }
  seq.sentences = SplitSentences(text);
  seq.text = std::move(text);
  return seq;
}

absl::StatusOr<Sequence> ParseSequenceLine(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("not a JSON object");
  }
  auto id = j.find("id");
  auto text = j.find("text");
  if (id == j.end() || !id->is_number_integer() ||
      (id->is_number_integer() && !id->is_number_unsigned() &&
       id->get<int64_t>() < 0)) {
    return absl::InvalidArgumentError("missing or invalid \"id\"");
  }
  if (text == j.end() || !text->is_string()) {
    return absl::InvalidArgumentError("missing or invalid \"text\"");
  }
  std::optional<int64_t> tokens;
  if (auto tc = j.find("token_count"); tc != j.end() && !tc->is_null()) {
    if (!tc->is_number_integer()) {
      return absl::InvalidArgumentError("\"token_count\" must be an integer");
    }
    tokens = tc->get<int64_t>();
  }
  return MakeSequence(id->get<uint64_t>(), text->get<std::string>(), tokens);
}

std::string SequenceToJsonLine(const Sequence& seq) {
  nlohmann::json j = {
      {"id", seq.id}, {"text", seq.text}, {"token_count", seq.token_count}};
  return j.dump();
}

absl::Status ForEachSequence(
    const std::string& path,
    const std::function<absl::Status(Sequence)>& visit) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::string line;
  for (int64_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    absl::StatusOr<Sequence> seq = ParseSequenceLine(line);
    if (!seq.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ":", number, ": ", seq.status().message()));
    }
    RETURN_IF_ERROR(visit(*std::move(seq)));
  }
  if (in.bad()) return absl::DataLossError(absl::StrCat("read error on ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Sequence>> ReadCorpus(const std::string& path) {
  std::vector<Sequence> corpus;
  std::unordered_set<uint64_t> ids;
  RETURN_IF_ERROR(ForEachSequence(path, [&](Sequence seq) -> absl::Status {
    if (!ids.insert(seq.id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": duplicate id ", seq.id));
    }
    corpus.push_back(std::move(seq));
    return absl::OkStatus();
  }));
  return corpus;
}

absl::Status WriteCorpus(const std::string& path,
                         std::span<const Sequence> corpus) {
  std::string out;
  for (const Sequence& seq : corpus) {
    out += SequenceToJsonLine(seq);
    out.push_back('\n');
  }
  return WriteFileAtomically(path, out);
}

}  // namespace selpt::selection
