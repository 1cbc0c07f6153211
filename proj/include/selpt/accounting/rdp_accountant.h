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

// Renyi-DP accountant for the Poisson subsampled Gaussian mechanism. Looser
// than the PLD accountant; kept as an independent cross-check.

#ifndef SELPT_ACCOUNTING_RDP_ACCOUNTANT_H_
#define SELPT_ACCOUNTING_RDP_ACCOUNTANT_H_

#include <vector>

#include "absl/status/statusor.h"
#include "selpt/accounting/privacy_budget.h"

namespace selpt::accounting {

// 1.25, 1.5, ..., 64 followed by 65, 66, ..., 256.
const std::vector<double>& DefaultRdpOrders();

// Renyi divergence of order `order` (> 1) for one step. Integer orders use
// the exact binomial expansion; fractional orders use the two-sided series
// with erfc tails. sampling_rate == 1 is the plain Gaussian, order/(2 s^2).
absl::StatusOr<double> SubsampledGaussianRdp(double noise_multiplier,
                                             double sampling_rate,
                                             double order);

// RDP -> (eps, delta) for one order:
//   eps = rdp + log1p(-1/a) - (log(delta) + log(a)) / (a - 1), clamped at 0.
double RdpToEpsilon(double rdp, double order, double delta);

// Best epsilon over `orders` (default grid) for `spec.steps` compositions.
absl::StatusOr<double> RdpEpsilon(const MechanismSpec& spec, double delta,
                                  const std::vector<double>& orders =
                                      DefaultRdpOrders());

}  // namespace selpt::accounting

#endif  // SELPT_ACCOUNTING_RDP_ACCOUNTANT_H_
