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


#include "selpt/common/parameter_file.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>

#include "absl/strings/str_cat.h"
#include "selpt/common/status_macros.h"
#include "selpt/common/text.h"

namespace selpt {
namespace {

static_assert(std::numeric_limits<double>::is_iec559);

template <typename T>
void AppendLittleEndian(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.append(bytes, sizeof(T));
}

template <typename T>
T ReadLittleEndian(std::string_view data, size_t offset) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, data.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

absl::Status WriteParameterFile(const std::string& path, std::string_view magic,
                                uint32_t version,
                                std::span<const uint32_t> shape,
                                std::span<const double> parameters) {
  if (magic.size() != 8) {
    return absl::InvalidArgumentError("parameter file magic must be 8 bytes");
  }
  std::string out(magic);
  out.reserve(8 + 4 * (shape.size() + 1) + 8 + 8 * parameters.size());
  AppendLittleEndian<uint32_t>(out, version);
  for (uint32_t s : shape) AppendLittleEndian<uint32_t>(out, s);
  AppendLittleEndian<uint64_t>(out, parameters.size());
  for (double p : parameters) {
    AppendLittleEndian<uint64_t>(out, std::bit_cast<uint64_t>(p));
  }
  return WriteFileAtomically(path, out);
}

absl::StatusOr<ParameterFile> ReadParameterFile(const std::string& path,
                                                std::string_view magic,
                                                size_t shape_fields) {
  ASSIGN_OR_RETURN(std::string data, ReadFile(path));
  const size_t header = 8 + 4 * (1 + shape_fields) + 8;
  if (data.size() < header || std::string_view(data).substr(0, 8) != magic) {
    return absl::DataLossError(
        absl::StrCat(path, ": not a parameter file of the expected kind"));
  }
  ParameterFile file;
  size_t offset = 8;
  file.version = ReadLittleEndian<uint32_t>(data, offset);
  offset += 4;
  for (size_t i = 0; i < shape_fields; ++i, offset += 4) {
    file.shape.push_back(ReadLittleEndian<uint32_t>(data, offset));
  }
  const uint64_t count = ReadLittleEndian<uint64_t>(data, offset);
  offset += 8;
  if ((data.size() - offset) / 8 != count || (data.size() - offset) % 8 != 0) {
    return absl::DataLossError(
        absl::StrCat(path, ": parameter count does not match file size"));
  }
  file.parameters.resize(count);
  for (uint64_t i = 0; i < count; ++i, offset += 8) {
    file.parameters[i] =
        std::bit_cast<double>(ReadLittleEndian<uint64_t>(data, offset));
  }
  return file;
}

}  // namespace selpt
