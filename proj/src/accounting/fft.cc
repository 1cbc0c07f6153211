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

#include "selpt/accounting/fft.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace selpt::accounting {
namespace {

using Complex = std::complex<double>;

// Twiddles e^{-2 pi i k / n} for k < n/2, evaluated directly per index so the
// table carries no accumulated rotation error.
std::vector<Complex> Twiddles(size_t n) {
  std::vector<Complex> w(n / 2);
  for (size_t k = 0; k < n / 2; ++k) {
    const double angle =
        -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    w[k] = Complex(std::cos(angle), std::sin(angle));
  }
  return w;
}

constexpr size_t kDirectThreshold = 1 << 14;

}  // namespace

void Fft(std::span<Complex> data, bool inverse) {
  const size_t n = data.size();
  if (n <= 1) return;
  const int log_n = std::countr_zero(n);

  for (size_t i = 0; i < n; ++i) {
    size_t j = 0;
    for (int b = 0; b < log_n; ++b) j |= ((i >> b) & 1) << (log_n - 1 - b);
    if (i < j) std::swap(data[i], data[j]);
  }

  const std::vector<Complex> twiddles = Twiddles(n);
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t half = len / 2;
    const size_t stride = n / len;
    for (size_t start = 0; start < n; start += len) {
      for (size_t k = 0; k < half; ++k) {
        Complex w = twiddles[k * stride];
        if (inverse) w = std::conj(w);
        const Complex u = data[start + k];
        const Complex v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

std::vector<double> ConvolveNonNegative(std::span<const double> a,
                                        std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const size_t out_size = a.size() + b.size() - 1;
  std::vector<double> out(out_size, 0.0);

  if (a.size() * b.size() <= kDirectThreshold) {
    for (size_t i = 0; i < a.size(); ++i) {
      for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }

  // Pack a into the real part and b into the imaginary part; one forward
  // transform yields both spectra.
  const size_t n = std::bit_ceil(out_size);
  std::vector<Complex> z(n);
  for (size_t i = 0; i < a.size(); ++i) z[i].real(a[i]);
  for (size_t i = 0; i < b.size(); ++i) z[i].imag(b[i]);
  Fft(z, /*inverse=*/false);

  std::vector<Complex> product(n);
  for (size_t k = 0; k < n; ++k) {
    const Complex zk = z[k];
    const Complex zc = std::conj(z[(n - k) & (n - 1)]);
    const Complex fa = 0.5 * (zk + zc);
    const Complex fb = Complex(0.0, -0.5) * (zk - zc);
    product[k] = fa * fb;
  }
  Fft(product, /*inverse=*/true);

  const double scale = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < out_size; ++i) {
    out[i] = std::max(0.0, product[i].real() * scale);
  }
  return out;
}

}  // namespace selpt::accounting
