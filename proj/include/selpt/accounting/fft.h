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

#ifndef SELPT_ACCOUNTING_FFT_H_
#define SELPT_ACCOUNTING_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace selpt::accounting {

// In-place iterative radix-2 FFT. data.size() must be a power of two.
// inverse=true computes the unnormalized inverse transform.
void Fft(std::span<std::complex<double>> data, bool inverse);

// Linear convolution of two non-negative sequences (length a+b-1). Round-off
// can leave values slightly below zero; those are clamped to zero. Small
// inputs use the direct sum.
std::vector<double> ConvolveNonNegative(std::span<const double> a,
                                        std::span<const double> b);

}  // namespace selpt::accounting

#endif  // SELPT_ACCOUNTING_FFT_H_
