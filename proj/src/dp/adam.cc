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


#include "selpt/dp/adam.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "selpt/common/status_macros.h"

namespace selpt::dp {

absl::StatusOr<AdamState> AdamState::Create(size_t dim,
                                            const AdamHyperparameters& hp) {
  AdamState state;
  state.first_moment.assign(dim, 0.0);
  state.second_moment.assign(dim, 0.0);
  state.beta1 = hp.beta1;
  state.beta2 = hp.beta2;
  state.epsilon_stability = hp.epsilon_stability;
  state.learning_rate = hp.learning_rate;
  state.weight_decay = hp.weight_decay;
  RETURN_IF_ERROR(state.Validate());
  return state;
}

absl::Status AdamState::Validate() const {
  if (first_moment.size() != second_moment.size()) {
    return absl::InvalidArgumentError("moment vectors differ in dimension");
  }
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
    return absl::InvalidArgumentError("Adam betas must lie in [0, 1)");
  }
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    return absl::InvalidArgumentError("learning rate must be positive");
  }
  if (!(weight_decay >= 0) || !(epsilon_stability >= 0)) {
    return absl::InvalidArgumentError(
        "weight decay and epsilon must be nonnegative");
  }
  if (step_count < 0) {
    return absl::InvalidArgumentError("negative step count");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> AdamStep(AdamState& state,
                                             std::span<const double> gradient,
                                             std::span<const double> params) {
  RETURN_IF_ERROR(state.Validate());
  const size_t d = state.first_moment.size();
  if (gradient.size() != d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "gradient has dimension ", gradient.size(), ", optimizer has ", d));
  }
  const bool decay = state.weight_decay > 0;
  if (decay && params.size() != d) {
    return absl::InvalidArgumentError(
        "weight decay needs the current parameters");
  }
  const int64_t t = state.step_count + 1;
  // 1 - beta^t; beta = 0 gives log(0) = -inf and a correction of 1.
  const double c1 = -std::expm1(static_cast<double>(t) * std::log(state.beta1));
  const double c2 = -std::expm1(static_cast<double>(t) * std::log(state.beta2));
  std::vector<double> delta(d);
  for (size_t i = 0; i < d; ++i) {
    const double g = gradient[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = state.beta1 * m + (1 - state.beta1) * g;
    v = state.beta2 * v + (1 - state.beta2) * g * g;
    const double m_hat = m / c1;
    const double v_hat = v / c2;
    double step = m_hat / (std::sqrt(v_hat) + state.epsilon_stability);
    if (decay) step += state.weight_decay * params[i];
    delta[i] = -state.learning_rate * step;
  }
  state.step_count = t;
  return delta;
}

absl::Status ApplyAdam(AdamState& state, std::span<const double> gradient,
                       std::span<double> params) {
  if (params.size() != gradient.size()) {
    return absl::InvalidArgumentError("parameter dimension mismatch");
  }
  ASSIGN_OR_RETURN(std::vector<double> delta,
                   AdamStep(state, gradient, params));
  for (size_t i = 0; i < delta.size(); ++i) params[i] += delta[i];
  return absl::OkStatus();
}

}  // namespace selpt::dp
