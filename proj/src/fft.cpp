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

#include "phaseconv/fft.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <numbers>

namespace phaseconv::fft {

namespace {

// Twiddles are taken from a per-size table built with std::polar for every
// index, so their error does not grow with the transform length.
std::vector<cplx> twiddles(std::size_t n, double sign) {
    std::vector<cplx> w(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        w[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    }
    return w;
}

void transform(std::vector<cplx> &a, double sign) {
    const std::size_t n = a.size();
    assert(std::has_single_bit(n));
    if (n <= 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const auto w = twiddles(n, sign);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * w[k * stride];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

}  // namespace

std::size_t next_pow2(std::size_t n) { return std::bit_ceil(n == 0 ? std::size_t{1} : n); }

void forward(std::vector<cplx> &data) { transform(data, -1.0); }

void inverse(std::vector<cplx> &data) {
    transform(data, +1.0);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto &x : data) x *= scale;
}

std::vector<double> convolve_real(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(out_len);

    // Both real inputs ride in one complex transform: z = a + i b.
    std::vector<cplx> z(n);
    for (std::size_t i = 0; i < a.size(); ++i) z[i].real(a[i]);
    for (std::size_t i = 0; i < b.size(); ++i) z[i].imag(b[i]);
    forward(z);

    std::vector<cplx> prod(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx zk = z[k];
        const cplx zc = std::conj(z[(n - k) & (n - 1)]);
        const cplx fa = 0.5 * (zk + zc);
        const cplx fb = cplx(0.0, -0.5) * (zk - zc);
        prod[k] = fa * fb;
    }
    inverse(prod);

    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = prod[i].real();
    return out;
}

std::vector<double> autocorrelation(const std::vector<double> &x) {
    if (x.empty()) return {};
    const std::size_t n = next_pow2(2 * x.size() - 1);
    std::vector<cplx> z(n);
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i];
    forward(z);
    for (auto &v : z) v = std::norm(v);
    inverse(z);
    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = z[k].real();
    return out;
}

}  // namespace phaseconv::fft
