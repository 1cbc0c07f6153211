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

// Discretized privacy loss distributions (PLDs).
//
// For a pair of output distributions (P, Q) of a mechanism on neighbouring
// datasets, the privacy loss L = log(dP/dQ) evaluated on a sample from P is a
// random variable; the mechanism is (eps, delta)-DP for
//
//   delta(eps) = P[L = +inf] + E_P[(1 - e^{eps - L})_+].
//
// A PLD stores the law of L on a uniform grid {k * spacing}, plus the mass
// placed at +inf (`truncation_mass`). Composing mechanisms adds their
// independent losses, i.e. convolves the PLDs. Every approximation made here
// (discretization, windowing, dropping negligible tails) moves mass towards
// larger losses or into the +inf atom, so the reported delta(eps) and
// eps(delta) are upper bounds for the underlying mechanism.

#ifndef SELPT_ACCOUNTING_PRIVACY_LOSS_DISTRIBUTION_H_
#define SELPT_ACCOUNTING_PRIVACY_LOSS_DISTRIBUTION_H_

#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace selpt::accounting {

enum class Discretization {
  // Mass of each grid interval (a, b] is split between a and b so that total
  // mass and E[e^{-L}] are preserved. The resulting delta(eps) curve equals
  // the true curve at grid points and interpolates it linearly in e^eps in
  // between, which is an upper bound by convexity. Error per composed step is
  // O(spacing^2).
  kConnectTheDots,
  // All mass of (a, b] is moved to b. Simple and pessimistic, but biases the
  // composed loss upwards by up to `spacing` per step.
  kRoundUp,
};

// Which neighbouring relation the pair (P, Q) encodes for a Poisson
// subsampled mechanism. kRemove: P is the output distribution on the larger
// dataset. kAdd: P is the output on the smaller one.
enum class Adjacency { kRemove, kAdd };

struct PldOptions {
  double grid_spacing = 1e-3;
  // Grid window is [-loss_range, loss_range]. Losses above the window go to
  // the +inf atom; losses below it are rounded up to the lowest grid point.
  double loss_range = 30.0;
  Discretization discretization = Discretization::kConnectTheDots;
  // Per construction/convolution, up to this much mass in each tail is
  // folded pessimistically (upper tail to +inf, lower tail upwards) to keep
  // the arrays short.
  double tail_mass_bound = 1e-15;

  absl::Status Validate() const;
};

class PrivacyLossDistribution {
 public:
  // masses[i] is the probability of loss (first_index + i) * grid_spacing.
  // Window indices bound the grid for subsequent compositions.
  static absl::StatusOr<PrivacyLossDistribution> Create(
      double grid_spacing, int64_t first_index, std::vector<double> masses,
      double truncation_mass, int64_t window_lo, int64_t window_hi,
      double tail_mass_bound = 1e-15);

  double grid_spacing() const { return grid_spacing_; }
  int64_t first_index() const { return first_index_; }
  // Loss value of the first stored grid point.
  double origin() const { return static_cast<double>(first_index_) * grid_spacing_; }
  double LossAt(size_t i) const {
    return static_cast<double>(first_index_ + static_cast<int64_t>(i)) *
           grid_spacing_;
  }
  const std::vector<double>& masses() const { return masses_; }
  double truncation_mass() const { return truncation_mass_; }
  int64_t window_lo() const { return window_lo_; }
  int64_t window_hi() const { return window_hi_; }
  double tail_mass_bound() const { return tail_mass_bound_; }

  // Sum of finite masses plus the +inf atom.
  double TotalMass() const;

 private:
  PrivacyLossDistribution() = default;

  double grid_spacing_ = 0.0;
  int64_t first_index_ = 0;
  std::vector<double> masses_;
  double truncation_mass_ = 0.0;
  int64_t window_lo_ = 0;
  int64_t window_hi_ = 0;
  double tail_mass_bound_ = 0.0;
};

// Gaussian mechanism with sensitivity 1 and noise std `noise_multiplier`.
absl::StatusOr<PrivacyLossDistribution> PldForGaussian(
    double noise_multiplier, const PldOptions& options = {});

// One step of the Gaussian mechanism applied to a Poisson subsample drawn with
// probability `sampling_rate`. At sampling_rate == 1 both adjacencies reduce
// to PldForGaussian.
absl::StatusOr<PrivacyLossDistribution> PldForSubsampledGaussian(
    double noise_multiplier, double sampling_rate,
    const PldOptions& options = {}, Adjacency adjacency = Adjacency::kRemove);

// Convolution of two PLDs on the same grid (sequential composition).
absl::StatusOr<PrivacyLossDistribution> ComposePair(
    const PrivacyLossDistribution& a, const PrivacyLossDistribution& b);

// `steps`-fold self composition by repeated squaring.
absl::StatusOr<PrivacyLossDistribution> ComposePld(
    const PrivacyLossDistribution& pld, int64_t steps);

// delta(eps) of the discretized distribution. eps may be any finite value.
double DeltaAtEpsilon(const PrivacyLossDistribution& pld, double epsilon);

// Smallest eps >= 0 with delta(eps) <= delta for the discretized
// distribution. Returns OutOfRange ("unachievable") when even the top of the
// grid cannot reach delta, which happens exactly when the +inf atom exceeds
// delta.
absl::StatusOr<double> EpsilonAtDelta(const PrivacyLossDistribution& pld,
                                      double delta);

}  // namespace selpt::accounting

#endif  // SELPT_ACCOUNTING_PRIVACY_LOSS_DISTRIBUTION_H_
