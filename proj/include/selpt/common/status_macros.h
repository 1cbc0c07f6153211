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

#ifndef SELPT_COMMON_STATUS_MACROS_H_
#define SELPT_COMMON_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define SELPT_STATUS_CONCAT_INNER_(x, y) x##y
#define SELPT_STATUS_CONCAT_(x, y) SELPT_STATUS_CONCAT_INNER_(x, y)

#define RETURN_IF_ERROR(expr)                  \
  do {                                         \
    const absl::Status _selpt_status = (expr); \
    if (!_selpt_status.ok()) {                 \
      return _selpt_status;                    \
    }                                          \
  } while (0)

#define SELPT_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                 \
  if (!statusor.ok()) {                                    \
    return statusor.status();                              \
  }                                                        \
  lhs = std::move(statusor).value()

#define ASSIGN_OR_RETURN(lhs, rexpr)                                        \
  SELPT_ASSIGN_OR_RETURN_IMPL_(                                             \
      SELPT_STATUS_CONCAT_(_selpt_statusor_, __LINE__), lhs, rexpr)

#endif  // SELPT_COMMON_STATUS_MACROS_H_
