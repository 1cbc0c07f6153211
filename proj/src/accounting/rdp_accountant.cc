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

#include "selpt/accounting/rdp_accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "selpt/common/status_macros.h"

namespace selpt::accounting {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

// log(exp(a) - exp(b)) for a >= b.
double LogSub(double a, double b) {
  if (b == kNegInf) return a;
  if (a <= b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

double LogErfc(double x) {
  if (x < 25.0) return std::log(std::erfc(x));
  // Asymptotic expansion; erfc underflows beyond this point.
  const double x2 = x * x;
  return -x2 - std::log(x) - 0.5 * std::log(std::numbers::pi) +
         std::log1p(-0.5 / x2 + 0.75 / (x2 * x2) - 1.875 / (x2 * x2 * x2));
}

double LogAInteger(double q, double sigma, int alpha) {
  double log_a = kNegInf;
  double log_binom = 0.0;  // log C(alpha, i)
  for (int i = 0; i <= alpha; ++i) {
    if (i > 0) log_binom += std::log(alpha - i + 1.0) - std::log(i);
    const double term = log_binom + i * std::log(q) +
                        (alpha - i) * std::log1p(-q) +
                        (static_cast<double>(i) * i - i) / (2 * sigma * sigma);
    log_a = LogAdd(log_a, term);
  }
  return log_a;
}

double LogAFractional(double q, double sigma, double alpha) {
  double log_a0 = kNegInf;
  double log_a1 = kNegInf;
  const double z0 = sigma * sigma * std::log(1.0 / q - 1.0) + 0.5;
  double log_coef = 0.0;  // log |C(alpha, i)|
  bool positive = true;
  for (int i = 0;; ++i) {
    if (i > 0) {
      const double ratio = (alpha - i + 1.0) / i;
      log_coef += std::log(std::abs(ratio));
      if (ratio < 0) positive = !positive;
    }
    const double j = alpha - i;
    const double log_t0 = log_coef + i * std::log(q) + j * std::log1p(-q);
    const double log_t1 = log_coef + j * std::log(q) + i * std::log1p(-q);
    const double log_e0 =
        std::log(0.5) + LogErfc((i - z0) / (std::numbers::sqrt2 * sigma));
    const double log_e1 =
        std::log(0.5) + LogErfc((z0 - j) / (std::numbers::sqrt2 * sigma));
    const double log_s0 =
        log_t0 + (static_cast<double>(i) * i - i) / (2 * sigma * sigma) + log_e0;
    const double log_s1 = log_t1 + (j * j - j) / (2 * sigma * sigma) + log_e1;
    if (positive) {
      log_a0 = LogAdd(log_a0, log_s0);
      log_a1 = LogAdd(log_a1, log_s1);
    } else {
      log_a0 = LogSub(log_a0, log_s0);
      log_a1 = LogSub(log_a1, log_s1);
    }
    if (std::max(log_s0, log_s1) < -30 || i > 10000) break;
  }
  return LogAdd(log_a0, log_a1);
}

}  // namespace

const std::vector<double>& DefaultRdpOrders() {
  static const std::vector<double>* orders = [] {
    auto* v = new std::vector<double>;
    for (int k = 5; k <= 256; ++k) v->push_back(0.25 * k);  // 1.25 .. 64
    for (int a = 65; a <= 256; ++a) v->push_back(a);
    return v;
  }();
  return *orders;
}

absl::StatusOr<double> SubsampledGaussianRdp(double noise_multiplier,
                                             double sampling_rate,
                                             double order) {
  if (!(order > 1) || !std::isfinite(order)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Renyi order must exceed 1, got ", order));
  }
  MechanismSpec spec{noise_multiplier, sampling_rate, 1};
  RETURN_IF_ERROR(spec.Validate());
  const double sigma = noise_multiplier;
  if (sampling_rate == 1.0) return order / (2 * sigma * sigma);
  const double log_a = order == std::floor(order)
                           ? LogAInteger(sampling_rate, sigma,
                                         static_cast<int>(order))
                           : LogAFractional(sampling_rate, sigma, order);
  return log_a / (order - 1);
}

double RdpToEpsilon(double rdp, double order, double delta) {
  const double eps = rdp + std::log1p(-1.0 / order) -
                     (std::log(delta) + std::log(order)) / (order - 1);
  return std::max(0.0, eps);
}

absl::StatusOr<double> RdpEpsilon(const MechanismSpec& spec, double delta,
                                  const std::vector<double>& orders) {
  RETURN_IF_ERROR(spec.Validate());
  if (!std::isfinite(delta) || delta <= 0 || delta >= 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (orders.empty()) return absl::InvalidArgumentError("no Renyi orders");
  double best = std::numeric_limits<double>::infinity();
  for (double order : orders) {
    ASSIGN_OR_RETURN(double rdp, SubsampledGaussianRdp(spec.noise_multiplier,
                                                       spec.sampling_rate,
                                                       order));
    const double total = rdp * static_cast<double>(spec.steps);
    if (!std::isfinite(total)) continue;
    best = std::min(best, RdpToEpsilon(total, order, delta));
  }
  return best;
}

}  // namespace selpt::accounting
