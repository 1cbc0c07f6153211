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


#include <cmath>

#include "absl/strings/str_cat.h"
#include "selpt/dp/dp_optimizer.h"

namespace selpt::dp {
namespace {

absl::Status CheckFinite(std::span<const double> v) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("non-finite gradient entry at coordinate ", i));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<GradientBatch> GradientBatch::FromVectors(
    const std::vector<std::vector<double>>& per_example) {
  if (per_example.empty()) {
    return absl::InvalidArgumentError("gradient batch must be non-empty");
  }
  GradientBatch batch(per_example.front().size());
  batch.data_.reserve(per_example.size() * batch.dim_);
  for (const auto& g : per_example) {
    absl::Status s = batch.AddExample(g);
    if (!s.ok()) return s;
  }
  return batch;
}

absl::Status GradientBatch::AddExample(std::span<const double> gradient) {
  if (gradient.size() != dim_) {
    return absl::InvalidArgumentError(
        absl::StrCat("gradient has dimension ", gradient.size(),
                     ", batch has ", dim_));
  }
  absl::Status s = CheckFinite(gradient);
  if (!s.ok()) return s;
  data_.insert(data_.end(), gradient.begin(), gradient.end());
  ++rows_;
  return absl::OkStatus();
}

absl::Status GradientBatch::Validate() const {
  if (rows_ == 0) {
    return absl::InvalidArgumentError("gradient batch must be non-empty");
  }
  return CheckFinite(data_);
}

}  // namespace selpt::dp
