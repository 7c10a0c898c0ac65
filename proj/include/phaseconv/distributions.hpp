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
#include <cstdint>
#include <span>
#include <vector>

namespace phaseconv {

/// Leading/trailing masses below this are dropped after convolution steps.
inline constexpr double kDefaultTrimThreshold = 1e-15;

/// Probability mass function on the contiguous integer range
/// [offset, offset + size()).
///
/// Invariants: every mass is >= 0, the total is within 1e-12 of 1, and the
/// first and last stored masses are nonzero. Offsets are absolute, so sums of
/// shifted spectra convolve exactly.
class IntDistribution {
   public:
    /// Validates `probs` as given (nonnegative, total within `tolerance` of 1),
    /// strips exact zeros at both ends and renormalizes the remainder.
    static IntDistribution from_probs(std::int64_t offset, std::vector<double> probs, double tolerance = 1e-12);
    static IntDistribution point_mass(std::int64_t at);

    std::int64_t offset() const noexcept { return offset_; }
    /// Largest support point.
    std::int64_t last() const noexcept { return offset_ + static_cast<std::int64_t>(probs_.size()) - 1; }
    std::size_t size() const noexcept { return probs_.size(); }
    std::span<const double> probs() const noexcept { return probs_; }
    double at(std::int64_t n) const noexcept;
    double total_mass() const noexcept;
    bool is_point_mass() const noexcept { return probs_.size() == 1; }

    /// Drops leading/trailing masses below `threshold` and renormalizes.
    IntDistribution trimmed(double threshold) const;

    /// For results of internal arithmetic: clamps negatives to zero, trims
    /// both ends below `trim_threshold` and renormalizes.
    static IntDistribution assemble(std::int64_t offset, std::vector<double> probs,
                                    double trim_threshold = 0.0);

    friend bool operator==(const IntDistribution &, const IntDistribution &) = default;

   private:
    IntDistribution(std::int64_t offset, std::vector<double> probs) : offset_(offset), probs_(std::move(probs)) {}

    std::int64_t offset_ = 0;
    std::vector<double> probs_;
};

/// Normal model on the number axis; parameters are already on the N-copy scale.
struct GaussianModel {
    double mean = 0.0;
    double variance = 1.0;

    static GaussianModel make(double mean, double variance);
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

struct PowerOptions {
    double trim_threshold = kDefaultTrimThreshold;
    /// Steps whose length product is at most this use direct convolution.
    std::size_t direct_threshold = 4096;
    /// Upper bound on any intermediate support length.
    std::size_t max_support = std::size_t{1} << 24;
};

struct PowerDiagnostics {
    /// Largest |total mass - 1| seen before renormalization.
    double max_mass_deviation = 0.0;
    /// Deviation was in (1e-10, 1e-6]: renormalized but worth reporting.
    bool warned = false;
};

/// Distribution of the sum of independent draws from `a` and `b`.
IntDistribution convolve(const IntDistribution &a, const IntDistribution &b);

/// `p` convolved with itself `copies` times, by exponentiation by squaring
/// with FFT steps. Working precision is double; round-off per FFT step is
/// about 1e-16 * log2(size) relative to the largest mass. Throws
/// precision_loss if the total mass drifts by more than 1e-6.
IntDistribution power_convolve(const IntDistribution &p, std::uint64_t copies, const PowerOptions &options = {},
                               PowerDiagnostics *diagnostics = nullptr);

Moments moments(const IntDistribution &p);

/// Unnormalized lattice value exp(-(n-mean)^2 / (2 var)) / sqrt(2 pi var).
double gaussian_point_mass(const GaussianModel &model, std::int64_t n);

/// Gaussian reference PMF on [lo, hi], renormalized to total mass one.
/// Throws support_too_narrow when the Gaussian mass outside
/// [lo - 1/2, hi + 1/2] exceeds 1e-9.
IntDistribution gaussian_pmf(const GaussianModel &model, std::int64_t lo, std::int64_t hi);
/// Same, on mean +/- 10 standard deviations.
IntDistribution gaussian_pmf(const GaussianModel &model);

/// sum_n |a_n - b_n| over the union of supports.
double l1_distance(const IntDistribution &a, const IntDistribution &b);

/// sum_n p_n exp(i n gamma).
std::complex<double> char_fn(const IntDistribution &p, double gamma);
/// sum_n sqrt(p_n) exp(i n gamma).
std::complex<double> amp_char_fn(const IntDistribution &p, double gamma);

/// Evaluates sum_n coeffs[n - offset] exp(i n gamma_k) on gamma_k = -pi + 2 pi k / points,
/// k = 0..points-1. `points` must be an even power of two.
std::vector<std::complex<double>> fourier_series_on_grid(std::int64_t offset, std::span<const double> coeffs,
                                                         std::size_t points);

}  // namespace phaseconv
