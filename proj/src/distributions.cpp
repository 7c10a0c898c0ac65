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

#include "phaseconv/distributions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

#include "phaseconv/error.hpp"
#include "phaseconv/fft.hpp"

namespace phaseconv {

namespace {

constexpr double kSilentRenormalize = 1e-10;
constexpr double kPrecisionBudget = 1e-6;

double kahan_sum(std::span<const double> v) {
    double sum = 0.0, c = 0.0;
    for (double x : v) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

std::vector<double> direct_convolve(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

}  // namespace

IntDistribution IntDistribution::from_probs(std::int64_t offset, std::vector<double> probs, double tolerance) {
    if (probs.empty()) throw Error(ErrorCode::invalid_argument, "probability list is empty");
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
            std::ostringstream os;
            os << "probability at index " << i << " is negative or not finite (" << probs[i] << ")";
            throw Error(ErrorCode::invalid_argument, os.str());
        }
    }
    const double total = kahan_sum(probs);
    if (std::abs(total - 1.0) > tolerance) {
        std::ostringstream os;
        os.precision(12);
        os << "probabilities sum to " << total << ", expected 1";
        throw Error(ErrorCode::invalid_argument, os.str());
    }
    return assemble(offset, std::move(probs), 0.0);
}

IntDistribution IntDistribution::point_mass(std::int64_t at) { return IntDistribution(at, {1.0}); }

IntDistribution IntDistribution::assemble(std::int64_t offset, std::vector<double> probs, double trim_threshold) {
    for (auto &x : probs) x = std::max(x, 0.0);
    const auto keep = [&](double x) { return x > trim_threshold && x > 0.0; };
    const auto first = std::find_if(probs.begin(), probs.end(), keep);
    if (first == probs.end()) throw Error(ErrorCode::precision_loss, "distribution has no mass above the trim threshold");
    const auto last = std::find_if(probs.rbegin(), probs.rend(), keep).base();
    const auto lead = std::distance(probs.begin(), first);
    probs.erase(last, probs.end());
    probs.erase(probs.begin(), first);
    const double total = kahan_sum(probs);
    for (auto &x : probs) x /= total;
    return IntDistribution(offset + lead, std::move(probs));
}

double IntDistribution::at(std::int64_t n) const noexcept {
    if (n < offset_ || n > last()) return 0.0;
    return probs_[static_cast<std::size_t>(n - offset_)];
}

double IntDistribution::total_mass() const noexcept { return kahan_sum(probs_); }

IntDistribution IntDistribution::trimmed(double threshold) const { return assemble(offset_, probs_, threshold); }

GaussianModel GaussianModel::make(double mean, double variance) {
    if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
        throw Error(ErrorCode::zero_variance, "Gaussian model needs a finite positive variance");
    }
    return GaussianModel{mean, variance};
}

IntDistribution convolve(const IntDistribution &a, const IntDistribution &b) {
    return IntDistribution::assemble(a.offset() + b.offset(), direct_convolve(a.probs(), b.probs()), 0.0);
}

IntDistribution power_convolve(const IntDistribution &p, std::uint64_t copies, const PowerOptions &options,
                               PowerDiagnostics *diagnostics) {
    if (copies == 0) throw Error(ErrorCode::invalid_argument, "power_convolve needs at least one copy");
    PowerDiagnostics diag;

    const auto step = [&](const IntDistribution &a, const IntDistribution &b) {
        const std::size_t len = a.size() + b.size() - 1;
        if (len > options.max_support) {
            std::ostringstream os;
            os << "convolution support " << len << " exceeds cap " << options.max_support;
            throw Error(ErrorCode::resource_exhausted, os.str());
        }
        std::vector<double> raw;
        if (a.size() * b.size() <= options.direct_threshold) {
            raw = direct_convolve(a.probs(), b.probs());
        } else {
            raw = fft::convolve_real({a.probs().begin(), a.probs().end()}, {b.probs().begin(), b.probs().end()});
        }
        // Mass drift: the total of the raw output (negatives count against it).
        double total = 0.0, negative = 0.0;
        for (double x : raw) {
            total += x;
            if (x < 0.0) negative -= x;
        }
        const double deviation = std::abs(total - 1.0) + negative;
        diag.max_mass_deviation = std::max(diag.max_mass_deviation, deviation);
        if (deviation > kPrecisionBudget) {
            std::ostringstream os;
            os << "FFT round-off moved total mass by " << deviation << " (budget " << kPrecisionBudget << ")";
            throw Error(ErrorCode::precision_loss, os.str());
        }
        if (deviation > kSilentRenormalize) diag.warned = true;
        return IntDistribution::assemble(a.offset() + b.offset(), std::move(raw), options.trim_threshold);
    };

    IntDistribution base = p;
    std::optional<IntDistribution> result;
    for (std::uint64_t n = copies;;) {
        if (n & 1u) result = result ? step(*result, base) : base;
        n >>= 1;
        if (n == 0) break;
        base = step(base, base);
    }
    if (diagnostics) *diagnostics = diag;
    return *result;
}

Moments moments(const IntDistribution &p) {
    const auto probs = p.probs();
    double mean = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) mean += static_cast<double>(i) * probs[i];
    double var = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double d = static_cast<double>(i) - mean;
        var += d * d * probs[i];
    }
    return {mean + static_cast<double>(p.offset()), var};
}

double gaussian_point_mass(const GaussianModel &model, std::int64_t n) {
    const double d = static_cast<double>(n) - model.mean;
    return std::exp(-d * d / (2.0 * model.variance)) / std::sqrt(2.0 * std::numbers::pi * model.variance);
}

IntDistribution gaussian_pmf(const GaussianModel &model, std::int64_t lo, std::int64_t hi) {
    if (!(model.variance > 0.0)) throw Error(ErrorCode::zero_variance, "Gaussian model needs positive variance");
    if (hi < lo) throw Error(ErrorCode::invalid_argument, "empty support range");
    const double scale = std::sqrt(2.0 * model.variance);
    const double lower_tail = 0.5 * std::erfc((model.mean - (static_cast<double>(lo) - 0.5)) / scale);
    const double upper_tail = 0.5 * std::erfc(((static_cast<double>(hi) + 0.5) - model.mean) / scale);
    if (lower_tail + upper_tail > 1e-9) {
        std::ostringstream os;
        os << "support [" << lo << ", " << hi << "] truncates Gaussian mass " << lower_tail + upper_tail;
        throw Error(ErrorCode::support_too_narrow, os.str());
    }
    std::vector<double> probs(static_cast<std::size_t>(hi - lo + 1));
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = gaussian_point_mass(model, lo + static_cast<std::int64_t>(i));
    return IntDistribution::assemble(lo, std::move(probs), 0.0);
}

IntDistribution gaussian_pmf(const GaussianModel &model) {
    if (!(model.variance > 0.0)) throw Error(ErrorCode::zero_variance, "Gaussian model needs positive variance");
    const double half_width = 10.0 * std::sqrt(model.variance) + 1.0;
    return gaussian_pmf(model, static_cast<std::int64_t>(std::floor(model.mean - half_width)),
                        static_cast<std::int64_t>(std::ceil(model.mean + half_width)));
}

double l1_distance(const IntDistribution &a, const IntDistribution &b) {
    const std::int64_t lo = std::min(a.offset(), b.offset());
    const std::int64_t hi = std::max(a.last(), b.last());
    double sum = 0.0;
    for (std::int64_t n = lo; n <= hi; ++n) sum += std::abs(a.at(n) - b.at(n));
    return sum;
}

namespace {

template <class Weight>
std::complex<double> weighted_phase_sum(const IntDistribution &p, double gamma, Weight weight) {
    // Phases are generated per term with std::polar; the support can be long
    // and a running product would accumulate drift.
    std::complex<double> sum = 0.0;
    const auto probs = p.probs();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double n = static_cast<double>(p.offset() + static_cast<std::int64_t>(i));
        sum += weight(probs[i]) * std::polar(1.0, n * gamma);
    }
    return sum;
}

}  // namespace

std::complex<double> char_fn(const IntDistribution &p, double gamma) {
    return weighted_phase_sum(p, gamma, [](double x) { return x; });
}

std::complex<double> amp_char_fn(const IntDistribution &p, double gamma) {
    return weighted_phase_sum(p, gamma, [](double x) { return std::sqrt(x); });
}

std::vector<std::complex<double>> fourier_series_on_grid(std::int64_t offset, std::span<const double> coeffs,
                                                         std::size_t points) {
    if (points < 2 || !std::has_single_bit(points)) {
        throw Error(ErrorCode::invalid_argument, "grid size must be a power of two >= 2");
    }
    // exp(i n gamma_k) = (-1)^n exp(2 pi i n k / points); with points even the
    // factor (-1)^n is periodic in n, so coefficients fold modulo `points`.
    std::vector<std::complex<double>> z(points);
    const auto mod = static_cast<std::int64_t>(points);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const std::int64_t n = offset + static_cast<std::int64_t>(i);
        const std::int64_t r = ((n % mod) + mod) % mod;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        z[static_cast<std::size_t>(r)] += sign * coeffs[i];
    }
    fft::inverse(z);
    for (auto &v : z) v *= static_cast<double>(points);
    return z;
}

}  // namespace phaseconv
