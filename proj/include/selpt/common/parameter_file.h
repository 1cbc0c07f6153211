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


// Flat parameter files: an 8-byte magic, a uint32 version, a list of uint32
// shape fields, a uint64 parameter count, then the parameters as
// little-endian IEEE-754 float64. Written atomically.

#ifndef SELPT_COMMON_PARAMETER_FILE_H_
#define SELPT_COMMON_PARAMETER_FILE_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace selpt {

struct ParameterFile {
  uint32_t version = 0;
  std::vector<uint32_t> shape;
  std::vector<double> parameters;
};

// `magic` must be exactly 8 bytes.
absl::Status WriteParameterFile(const std::string& path, std::string_view magic,
                                uint32_t version,
                                std::span<const uint32_t> shape,
                                std::span<const double> parameters);

// Fails unless the magic matches and the file holds exactly `shape_fields`
// shape entries followed by the declared number of parameters.
absl::StatusOr<ParameterFile> ReadParameterFile(const std::string& path,
                                                std::string_view magic,
                                                size_t shape_fields);

}  // namespace selpt

#endif  // SELPT_COMMON_PARAMETER_FILE_H_
