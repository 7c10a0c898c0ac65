// Copyright 2026 The phaseconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Radix-2 FFT used by the convolution and autocorrelation routines.
namespace phaseconv::fft {

using cplx = std::complex<double>;

/// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

/// In-place forward transform, X_k = sum_n x_n exp(-2 pi i n k / size).
/// `data.size()` must be a power of two.
void forward(std::vector<cplx> &data);

/// In-place inverse transform including the 1/size factor.
void inverse(std::vector<cplx> &data);

/// Linear convolution of two real sequences. Output length a.size() + b.size() - 1.
std::vector<double> convolve_real(const std::vector<double> &a, const std::vector<double> &b);

/// Autocorrelation R(k) = sum_n x_{n+k} x_n for k = 0..x.size()-1 (R is even in k).
std::vector<double> autocorrelation(const std::vector<double> &x);

}  // namespace phaseconv::fft
