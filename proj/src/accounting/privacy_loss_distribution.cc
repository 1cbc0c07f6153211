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

#include "selpt/accounting/privacy_loss_distribution.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "absl/strings/str_cat.h"
#include "selpt/accounting/fft.h"
#include "selpt/common/status_macros.h"

namespace selpt::accounting {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTolerance = 1e-9;
constexpr double kMaxLossRange = 500.0;

double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double NormalSf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// Probabilities of {L <= l} and {L > l} under both P and Q.
struct LossTail {
  double p_cdf;
  double p_sf;
  double q_cdf;
  double q_sf;
};

// Inverse of x -> log(1 - q + q exp((2x - 1) / (2 sigma^2))): the x at which
// the remove-direction loss equals `loss`. -inf below the loss floor log(1-q).
double SubsampledThreshold(double loss, double sigma, double q) {
  if (q == 1.0) return sigma * sigma * loss + 0.5;
  const double t = std::expm1(loss) + q;
  if (t <= 0) return -kInf;
  return sigma * sigma * (std::log(t) - std::log(q)) + 0.5;
}

// Remove direction: P = (1-q) N(0, s^2) + q N(1, s^2), Q = N(0, s^2); the
// loss is increasing in x, so {L <= l} = {x <= threshold(l)}.
LossTail RemoveTail(double loss, double sigma, double q) {
  const double x = SubsampledThreshold(loss, sigma, q);
  if (x == -kInf) return {0.0, 1.0, 0.0, 1.0};
  const double z0 = x / sigma;
  const double z1 = (x - 1.0) / sigma;
  return {
      (1.0 - q) * NormalCdf(z0) + q * NormalCdf(z1),
      (1.0 - q) * NormalSf(z0) + q * NormalSf(z1),
      NormalCdf(z0),
      NormalSf(z0),
  };
}

// Add direction: P = N(0, s^2), Q = the mixture; the loss is the negated
// remove-direction loss, decreasing in x, so {L <= l} = {x >= threshold(-l)}.
LossTail AddTail(double loss, double sigma, double q) {
  const double x = SubsampledThreshold(-loss, sigma, q);
  if (x == -kInf) return {1.0, 0.0, 1.0, 0.0};
  const double z0 = x / sigma;
  const double z1 = (x - 1.0) / sigma;
  return {
      NormalSf(z0),
      NormalCdf(z0),
      (1.0 - q) * NormalSf(z0) + q * NormalSf(z1),
      (1.0 - q) * NormalCdf(z0) + q * NormalCdf(z1),
  };
}

// Mass of (a, b] from tail probabilities at both ends, using whichever side
// keeps relative precision.
double IntervalMass(double cdf_a, double sf_a, double cdf_b, double sf_b) {
  const double mass = cdf_b <= 0.5 ? cdf_b - cdf_a : sf_a - sf_b;
  return std::max(0.0, mass);
}

template <typename TailFn>
absl::StatusOr<PrivacyLossDistribution> Discretize(TailFn tail,
                                                   const PldOptions& options) {
  RETURN_IF_ERROR(options.Validate());
  const double h = options.grid_spacing;
  const int64_t half = static_cast<int64_t>(std::floor(options.loss_range / h));
  const int64_t lo = -half;
  const int64_t hi = half;
  const size_t n = static_cast<size_t>(hi - lo + 1);

  std::vector<LossTail> tails(n);
  for (size_t i = 0; i < n; ++i) {
    tails[i] = tail(static_cast<double>(lo + static_cast<int64_t>(i)) * h);
  }

  std::vector<double> masses(n, 0.0);
  // Everything at or below the lowest grid point is rounded up onto it.
  masses[0] = tails[0].p_cdf;
  for (size_t i = 0; i + 1 < n; ++i) {
    const LossTail& ta = tails[i];
    const LossTail& tb = tails[i + 1];
    const double m0 = IntervalMass(ta.p_cdf, ta.p_sf, tb.p_cdf, tb.p_sf);
    if (m0 == 0.0) continue;
    if (options.discretization == Discretization::kRoundUp) {
      masses[i + 1] += m0;
      continue;
    }
    // Q-mass of the interval equals E_P[e^{-L}; L in (a, b]].
    const double m1 = IntervalMass(ta.q_cdf, ta.q_sf, tb.q_cdf, tb.q_sf);
    const double a = static_cast<double>(lo + static_cast<int64_t>(i)) * h;
    double upper = (m0 - std::exp(a) * m1) / (-std::expm1(-h));
    upper = std::clamp(upper, 0.0, m0);
    masses[i + 1] += upper;
    masses[i] += m0 - upper;
  }
  const double truncation = tails[n - 1].p_sf;
  return PrivacyLossDistribution::Create(h, lo, std::move(masses), truncation,
                                         lo, hi, options.tail_mass_bound);
}

}  // namespace

absl::Status PldOptions::Validate() const {
  if (!std::isfinite(grid_spacing) || grid_spacing <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid_spacing must be positive, got ", grid_spacing));
  }
  if (!std::isfinite(loss_range) || loss_range <= 0 ||
      loss_range > kMaxLossRange) {
    return absl::InvalidArgumentError(absl::StrCat(
        "loss_range must lie in (0, ", kMaxLossRange, "], got ", loss_range));
  }
  if (std::floor(loss_range / grid_spacing) < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "grid_spacing ", grid_spacing, " leaves fewer than 3 grid points in [",
        -loss_range, ", ", loss_range, "]"));
  }
  if (!(tail_mass_bound >= 0) || tail_mass_bound > 1e-6) {
    return absl::InvalidArgumentError("tail_mass_bound must lie in [0, 1e-6]");
  }
  return absl::OkStatus();
}

absl::StatusOr<PrivacyLossDistribution> PrivacyLossDistribution::Create(
    double grid_spacing, int64_t first_index, std::vector<double> masses,
    double truncation_mass, int64_t window_lo, int64_t window_hi,
    double tail_mass_bound) {
  if (!std::isfinite(grid_spacing) || grid_spacing <= 0) {
    return absl::InvalidArgumentError("grid_spacing must be positive");
  }
  if (!std::isfinite(truncation_mass) || truncation_mass < 0) {
    return absl::InvalidArgumentError("truncation_mass must be non-negative");
  }
  if (window_lo > window_hi) {
    return absl::InvalidArgumentError("empty grid window");
  }
  double total = truncation_mass;
  for (double m : masses) {
    if (!std::isfinite(m) || m < 0) {
      return absl::InvalidArgumentError("masses must be finite and >= 0");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("total mass ", total, " differs from 1"));
  }

  // Fold the grid into the window: above goes to +inf, below rounds up.
  const int64_t last_index = first_index + static_cast<int64_t>(masses.size()) - 1;
  if (!masses.empty() && (first_index < window_lo || last_index > window_hi)) {
    const int64_t new_first = std::max(first_index, window_lo);
    const int64_t new_last = std::min(last_index, window_hi);
    double below = 0.0;
    double above = 0.0;
    std::vector<double> kept;
    if (new_first <= new_last) {
      kept.assign(masses.begin() + (new_first - first_index),
                  masses.begin() + (new_last - first_index) + 1);
    }
    for (int64_t k = first_index; k < std::min(new_first, last_index + 1); ++k) {
      below += masses[static_cast<size_t>(k - first_index)];
    }
    for (int64_t k = std::max(new_last + 1, first_index); k <= last_index; ++k) {
      above += masses[static_cast<size_t>(k - first_index)];
    }
    if (kept.empty()) {
      // Everything fell outside; keep a single point at the window floor.
      kept.assign(1, 0.0);
      first_index = window_lo;
      if (last_index < window_lo) {
        kept[0] = below;
        below = 0.0;
      }
    } else {
      first_index = new_first;
    }
    kept[0] += below;
    truncation_mass += above;
    masses = std::move(kept);
  }

  // Drop negligible tails pessimistically.
  size_t top = masses.size();
  double cut = 0.0;
  while (top > 1 && cut + masses[top - 1] <= tail_mass_bound) {
    cut += masses[--top];
  }
  truncation_mass += cut;
  size_t bottom = 0;
  double folded = 0.0;
  while (bottom + 1 < top && folded + masses[bottom] <= tail_mass_bound) {
    folded += masses[bottom++];
  }
  if (bottom > 0 || top < masses.size()) {
    std::vector<double> trimmed(masses.begin() + bottom, masses.begin() + top);
    trimmed[0] += folded;
    first_index += static_cast<int64_t>(bottom);
    masses = std::move(trimmed);
  }
  if (masses.empty()) {
    masses.assign(1, 0.0);
    first_index = window_hi;
  }

  PrivacyLossDistribution pld;
  pld.grid_spacing_ = grid_spacing;
  pld.first_index_ = first_index;
  pld.masses_ = std::move(masses);
  pld.truncation_mass_ = std::min(1.0, truncation_mass);
  pld.window_lo_ = window_lo;
  pld.window_hi_ = window_hi;
  pld.tail_mass_bound_ = tail_mass_bound;
  return pld;
}

double PrivacyLossDistribution::TotalMass() const {
  double total = truncation_mass_;
  for (double m : masses_) total += m;
  return total;
}

absl::StatusOr<PrivacyLossDistribution> PldForGaussian(
    double noise_multiplier, const PldOptions& options) {
  if (!std::isfinite(noise_multiplier) || noise_multiplier <= 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise_multiplier must be positive, got ", noise_multiplier));
  }
  return Discretize(
      [noise_multiplier](double loss) {
        return RemoveTail(loss, noise_multiplier, 1.0);
      },
      options);
}

absl::StatusOr<PrivacyLossDistribution> PldForSubsampledGaussian(
    double noise_multiplier, double sampling_rate, const PldOptions& options,
    Adjacency adjacency) {
  if (!std::isfinite(noise_multiplier) || noise_multiplier <= 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise_multiplier must be positive, got ", noise_multiplier));
  }
  if (!std::isfinite(sampling_rate) || sampling_rate <= 0 ||
      sampling_rate > 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling_rate must lie in (0, 1], got ", sampling_rate));
  }
  if (adjacency == Adjacency::kRemove || sampling_rate == 1.0) {
    return Discretize(
        [=](double loss) {
          return RemoveTail(loss, noise_multiplier, sampling_rate);
        },
        options);
  }
  return Discretize(
      [=](double loss) { return AddTail(loss, noise_multiplier, sampling_rate); },
      options);
}

absl::StatusOr<PrivacyLossDistribution> ComposePair(
    const PrivacyLossDistribution& a, const PrivacyLossDistribution& b) {
  if (a.grid_spacing() != b.grid_spacing()) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid spacings differ: ", a.grid_spacing(), " vs ",
                     b.grid_spacing()));
  }
  std::vector<double> masses = ConvolveNonNegative(a.masses(), b.masses());
  const double ta = a.truncation_mass();
  const double tb = b.truncation_mass();
  double truncation = ta + tb - ta * tb;
  // FFT round-off can leave the finite part a hair above (1-ta)(1-tb);
  // renormalize the finite part to exactly that so mass never drifts.
  double finite = 0.0;
  for (double m : masses) finite += m;
  const double expected = (1.0 - ta) * (1.0 - tb);
  if (finite > expected && finite > 0) {
    const double scale = expected / finite;
    for (double& m : masses) m *= scale;
  } else {
    // Lost mass (from clamping) is charged to +inf.
    truncation += expected - finite;
  }
  return PrivacyLossDistribution::Create(
      a.grid_spacing(), a.first_index() + b.first_index(), std::move(masses),
      truncation, std::min(a.window_lo(), b.window_lo()),
      std::max(a.window_hi(), b.window_hi()),
      std::max(a.tail_mass_bound(), b.tail_mass_bound()));
}

absl::StatusOr<PrivacyLossDistribution> ComposePld(
    const PrivacyLossDistribution& pld, int64_t steps) {
  if (steps < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("steps must be at least 1, got ", steps));
  }
  std::optional<PrivacyLossDistribution> result;
  PrivacyLossDistribution base = pld;
  while (true) {
    if (steps & 1) {
      if (result.has_value()) {
        ASSIGN_OR_RETURN(result, ComposePair(*result, base));
      } else {
        result = base;
      }
    }
    steps >>= 1;
    if (steps == 0) break;
    ASSIGN_OR_RETURN(base, ComposePair(base, base));
  }
  return *std::move(result);
}

double DeltaAtEpsilon(const PrivacyLossDistribution& pld, double epsilon) {
  long double delta = pld.truncation_mass();
  const auto& masses = pld.masses();
  for (size_t i = masses.size(); i-- > 0;) {
    const double loss = pld.LossAt(i);
    if (loss <= epsilon) break;
    delta += static_cast<long double>(masses[i]) *
             -std::expm1(static_cast<long double>(epsilon - loss));
  }
  return static_cast<double>(delta);
}

absl::StatusOr<double> EpsilonAtDelta(const PrivacyLossDistribution& pld,
                                      double delta) {
  if (!std::isfinite(delta) || delta <= 0 || delta >= 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (pld.truncation_mass() > delta) {
    return absl::OutOfRangeError(absl::StrCat(
        "unachievable: mass ", pld.truncation_mass(),
        " at infinite loss already exceeds delta ", delta));
  }
  if (DeltaAtEpsilon(pld, 0.0) <= delta) return 0.0;

  // Walk down from the top grid point tracking
  //   delta(l_j) = inf + sum_{i>j} m_i - e^{l_j} sum_{i>j} m_i e^{-l_i}.
  const auto& masses = pld.masses();
  long double tail_mass = 0.0L;
  long double tail_weighted = 0.0L;
  auto delta_at = [&](size_t j) {
    const long double y = std::exp(static_cast<long double>(pld.LossAt(j)));
    return static_cast<long double>(pld.truncation_mass()) + tail_mass -
           y * tail_weighted;
  };
  size_t j = masses.size() - 1;
  long double delta_hi = delta_at(j);  // == truncation_mass
  while (j > 0) {
    tail_mass += masses[j];
    tail_weighted +=
        masses[j] * std::exp(-static_cast<long double>(pld.LossAt(j)));
    const long double delta_lo = delta_at(j - 1);
    if (delta_lo > delta) {
      // Answer lies in (l_{j-1}, l_j]; delta is linear in e^eps there.
      const long double y_lo = std::exp(static_cast<long double>(pld.LossAt(j - 1)));
      const long double y_hi = std::exp(static_cast<long double>(pld.LossAt(j)));
      const long double frac = (delta_lo - delta) / (delta_lo - delta_hi);
      const long double y = y_lo + frac * (y_hi - y_lo);
      return std::max(0.0, static_cast<double>(std::log(y)));
    }
    delta_hi = delta_lo;
    --j;
  }
  // Even the lowest grid point meets delta; below it delta(eps) is still
  // linear in e^eps with all mass above, so solve directly.
  const long double slope = tail_weighted + masses[0] * std::exp(-static_cast<long double>(pld.LossAt(0)));
  const long double total = pld.truncation_mass() + tail_mass + masses[0];
  const long double y = (total - delta) / slope;
  return y > 0 ? std::max(0.0, static_cast<double>(std::log(y))) : 0.0;
}

}  // namespace selpt::accounting
