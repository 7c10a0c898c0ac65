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

#include "phaseconv/zd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "phaseconv/error.hpp"

namespace phaseconv::zd {

namespace {

using cplx = std::complex<double>;

// omega^{e} with the exponent reduced mod d first, so the angle stays in [0, 2 pi).
cplx omega_pow(std::size_t d, std::int64_t e) {
    const auto dd = static_cast<std::int64_t>(d);
    const std::int64_t r = ((e % dd) + dd) % dd;
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(d));
}

std::vector<double> checked_probs(std::span<const double> p) {
    if (p.size() < 2) throw Error(ErrorCode::invalid_argument, "Z_d needs d >= 2");
    double total = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorCode::invalid_argument, "probabilities must be >= 0");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(12);
        os << "probabilities sum to " << total << ", expected 1";
        throw Error(ErrorCode::invalid_argument, os.str());
    }
    std::vector<double> out(p.begin(), p.end());
    for (auto &x : out) x /= total;
    return out;
}

cplx dft_component(std::span<const double> p, std::size_t k) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) s += p[j] * omega_pow(p.size(), static_cast<std::int64_t>(k * j));
    return s;
}

cplx int_pow(cplx z, std::uint64_t n) {
    cplx result = 1.0;
    while (n) {
        if (n & 1u) result *= z;
        z *= z;
        n >>= 1;
    }
    return result;
}

// sum_j omega^{s j} sqrt(c_j) for s != 0 mod d, written as
// sum_j omega^{s j} (sqrt(c_j) - 1/sqrt(d)) since the plain sum of omega^{s j} vanishes.
cplx shifted_amplitude_sum(const CyclicCoeffs &cc, std::int64_t s) {
    const double root = 1.0 / std::sqrt(static_cast<double>(cc.d));
    cplx sum = 0.0;
    for (std::size_t j = 0; j < cc.d; ++j) {
        const double excess = cc.deviation[j] / (std::sqrt(cc.c[j]) + root);
        sum += omega_pow(cc.d, s * static_cast<std::int64_t>(j)) * excess;
    }
    return sum;
}

void check_d(std::span<const double> p, std::size_t d) {
    if (p.size() != d) throw Error(ErrorCode::invalid_argument, "probability vector length must equal d");
}

}  // namespace

CyclicState CyclicState::from_probs(std::span<const double> p) {
    const auto probs = checked_probs(p);
    std::vector<cplx> a(probs.size());
    std::transform(probs.begin(), probs.end(), a.begin(), [](double x) { return cplx(std::sqrt(x), 0.0); });
    return CyclicState(std::move(a));
}

CyclicState CyclicState::eta(std::size_t d, std::int64_t m) {
    if (d < 2) throw Error(ErrorCode::invalid_argument, "Z_d needs d >= 2");
    std::vector<cplx> a(d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t j = 0; j < d; ++j) a[j] = norm * omega_pow(d, m * static_cast<std::int64_t>(j));
    return CyclicState(std::move(a));
}

CyclicState CyclicState::from_amplitudes(std::vector<cplx> amplitudes) {
    if (amplitudes.size() < 2) throw Error(ErrorCode::invalid_argument, "Z_d needs d >= 2");
    double total = 0.0;
    for (const auto &a : amplitudes) total += std::norm(a);
    if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::invalid_argument, "cyclic state is not normalized");
    return CyclicState(std::move(amplitudes));
}

double contraction_rate(std::span<const double> p) {
    const auto probs = checked_probs(p);
    double eps = 0.0;
    for (std::size_t k = 1; k < probs.size(); ++k) eps = std::max(eps, std::abs(dft_component(probs, k)));
    return std::min(eps, 1.0);
}

CyclicCoeffs canonical_coeffs(std::span<const double> p, std::uint64_t copies) {
    if (copies == 0) throw Error(ErrorCode::invalid_argument, "need at least one copy");
    const auto probs = checked_probs(p);
    const std::size_t d = probs.size();

    std::vector<cplx> powered(d);
    double eps = 0.0;
    for (std::size_t k = 1; k < d; ++k) {
        const cplx hat = dft_component(probs, k);
        eps = std::max(eps, std::abs(hat));
        powered[k] = int_pow(hat, copies);
    }

    CyclicCoeffs out;
    out.d = d;
    out.epsilon = std::min(eps, 1.0);
    out.c.resize(d);
    out.deviation.resize(d);
    const double inv_d = 1.0 / static_cast<double>(d);
    for (std::size_t j = 0; j < d; ++j) {
        cplx s = 0.0;
        for (std::size_t k = 1; k < d; ++k) s += powered[k] * omega_pow(d, -static_cast<std::int64_t>(j * k));
        out.deviation[j] = inv_d * s.real();
        out.c[j] = std::max(0.0, inv_d + out.deviation[j]);
    }
    const double total = std::accumulate(out.c.begin(), out.c.end(), 0.0);
    for (auto &x : out.c) x /= total;
    // Keep the deviations consistent with the clamped coefficients.
    for (std::size_t j = 0; j < d; ++j) {
        if (out.c[j] == 0.0) out.deviation[j] = -inv_d;
    }
    return out;
}

std::vector<double> brute_force_coeffs(std::span<const double> p, std::uint64_t copies, std::uint64_t max_tuples) {
    const auto probs = checked_probs(p);
    const std::size_t d = probs.size();
    std::uint64_t tuples = 1;
    for (std::uint64_t i = 0; i < copies; ++i) {
        if (tuples > max_tuples / d) {
            throw Error(ErrorCode::cap_exceeded, "brute-force enumeration d^N exceeds the tuple cap");
        }
        tuples *= d;
    }

    std::vector<double> c(d, 0.0);
    std::vector<std::size_t> digits(copies, 0);
    for (std::uint64_t t = 0; t < tuples; ++t) {
        double weight = 1.0;
        std::size_t residue = 0;
        for (auto digit : digits) {
            weight *= probs[digit];
            residue += digit;
        }
        c[residue % d] += weight;
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (++digits[i] < d) break;
            digits[i] = 0;
        }
    }
    return c;
}

std::vector<double> outcome_distribution(std::span<const double> p, std::uint64_t copies, std::size_t d,
                                         std::int64_t m_true) {
    check_d(p, d);
    const auto cc = canonical_coeffs(p, copies);
    const auto dd = static_cast<std::int64_t>(d);
    std::vector<double> out(d);
    double wrong = 0.0;
    for (std::size_t m1 = 0; m1 < d; ++m1) {
        const std::int64_t s = ((m_true - static_cast<std::int64_t>(m1)) % dd + dd) % dd;
        if (s == 0) continue;
        out[m1] = std::norm(shifted_amplitude_sum(cc, s)) / static_cast<double>(d);
        wrong += out[m1];
    }
    out[static_cast<std::size_t>(((m_true % dd) + dd) % dd)] = 1.0 - wrong;
    return out;
}

std::vector<double> outcome_distribution(const CyclicState &state, std::int64_t m_true) {
    const std::size_t d = state.d();
    std::vector<double> out(d);
    for (std::size_t m1 = 0; m1 < d; ++m1) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            s += omega_pow(d, (m_true - static_cast<std::int64_t>(m1)) * static_cast<std::int64_t>(j)) *
                 state.amplitudes()[j];
        }
        out[m1] = std::norm(s) / static_cast<double>(d);
    }
    return out;
}

double failure_probability(std::span<const double> p, std::uint64_t copies, std::size_t d) {
    check_d(p, d);
    const auto cc = canonical_coeffs(p, copies);
    double wrong = 0.0;
    for (std::size_t s = 1; s < d; ++s) wrong += std::norm(shifted_amplitude_sum(cc, static_cast<std::int64_t>(s)));
    return wrong / static_cast<double>(d);
}

double success_probability(std::span<const double> p, std::uint64_t copies, std::size_t d) {
    return 1.0 - failure_probability(p, copies, d);
}

RateFit fit_failure_rate(std::span<const double> p, std::size_t d, std::span<const std::uint64_t> copies) {
    if (copies.size() < 2) throw Error(ErrorCode::invalid_argument, "slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto n : copies) {
        const double fail = failure_probability(p, n, d);
        if (!(fail > 0.0)) throw Error(ErrorCode::precision_loss, "failure probability underflowed to zero");
        const double x = static_cast<double>(n), y = std::log(fail);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = static_cast<double>(copies.size());
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return {slope, (sy - slope * sx) / k};
}

}  // namespace phaseconv::zd
