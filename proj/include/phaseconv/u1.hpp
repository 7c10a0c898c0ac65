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

// U(1) estimation-preparation pipeline: standard-form number states, the
// covariant-measurement posterior over the misalignment gamma = theta -
// theta0, preparation fidelities and the averaged figure of merit.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "phaseconv/distributions.hpp"
#include "phaseconv/random.hpp"

namespace phaseconv::u1 {

struct StandardizeOptions {
    /// Tail masses below this are cut (unbounded spectra are supplied truncated).
    double truncation = 1e-12;
    /// Only for negative tests: keep spectra with interior zeros.
    bool allow_gapped = false;
};

/// Pure state sum_n sqrt(p_n) |n> in standard form (nonnegative amplitudes,
/// multiplicities dropped). The number spectrum is bounded below (offset >= 0)
/// and, unless overridden, gapless.
class NumberState {
   public:
    const IntDistribution &spectrum() const noexcept { return spectrum_; }
    double mean() const noexcept { return moments_.mean; }
    double variance() const noexcept { return moments_.variance; }
    /// A single number eigenstate: invariant under U(1), carries no phase information.
    bool asymmetry_free() const noexcept { return spectrum_.is_point_mass(); }
    bool gapless() const noexcept { return gapless_; }
    /// Mass removed by the tail truncation.
    double truncated_mass() const noexcept { return truncated_mass_; }

   private:
    friend NumberState standardize(const IntDistribution &, const StandardizeOptions &);
    NumberState(IntDistribution spectrum, bool gapless, double truncated)
        : spectrum_(std::move(spectrum)), moments_(moments(spectrum_)), gapless_(gapless), truncated_mass_(truncated) {}

    IntDistribution spectrum_;
    Moments moments_;
    bool gapless_ = true;
    double truncated_mass_ = 0.0;
};

/// Throws negative_offset or gapped_spectrum.
NumberState standardize(const IntDistribution &raw_spectrum, const StandardizeOptions &options = {});

/// N-copy posterior: exact number distribution of phi^{(x)N} plus its
/// Gaussian model (mean N mu, variance N sigma^2).
struct PosteriorSpec {
    IntDistribution ncopy_spectrum;
    std::uint64_t n_copies = 1;
    double mean = 0.0;      ///< N mu_phi
    double variance = 0.0;  ///< N sigma_phi^2

    static PosteriorSpec make(const NumberState &source, std::uint64_t copies, const PowerOptions &options = {});
};

/// Density of gamma in (-pi, pi]: |sum_n sqrt(P_n) e^{i n gamma}|^2 / (2 pi).
double posterior_density_exact(const PosteriorSpec &spec, double gamma);

/// Gaussian model sqrt(2 N sigma^2 / pi) exp(-2 N sigma^2 gamma^2).
/// Throws zero_variance for an asymmetry-free source.
double posterior_density_gauss(const PosteriorSpec &spec, double gamma);

/// Joint density of (theta0, theta) per rad^2, from the Born rule for the
/// covariant measurement seeded by |eta> = sum_n |n>:
/// |<eta| U(theta)^dag U(theta0) |phi^N>|^2 / (2 pi)^2.
double born_joint_density(const PosteriorSpec &spec, double theta0, double theta);

enum class SampleMode { exact, gauss };

/// Draws gamma from the posterior. Exact mode inverts a piecewise-linear CDF
/// built on a uniform grid of max(4096, 4 * support) points (or
/// `grid_points`); gauss mode draws N(0, 1 / (4 N sigma^2)) wrapped to (-pi, pi].
class PosteriorSampler {
   public:
    PosteriorSampler(const PosteriorSpec &spec, SampleMode mode, std::size_t grid_points = 0);
    double draw(Rng &rng) const;
    std::size_t grid_points() const noexcept { return cdf_.empty() ? 0 : cdf_.size() - 1; }

   private:
    SampleMode mode_;
    double gauss_stddev_ = 0.0;
    std::vector<double> cdf_;  // cdf_[k] = P(gamma <= -pi + k h)
};

/// One draw, deterministic given the seed.
double sample_gamma(const PosteriorSpec &spec, std::uint64_t rng_seed, SampleMode mode);

/// |sum_n Q_n e^{i n gamma}|^2 with Q the exact M-copy number distribution of `target`.
double fidelity_pure_exact(const NumberState &target, std::uint64_t copies, double gamma);
/// Same with Q already computed.
double fidelity_from_ncopy(const IntDistribution &ncopy_target, double gamma);

/// exp(-M sigma^2 gamma^2).
double fidelity_pure_gauss(double sigma_sq, std::uint64_t copies, double gamma);

/// Average preparation fidelity over the posterior, exact: with A the
/// autocorrelation of sqrt(P~) and B that of Q~, f = sum_k A(k) B(k).
double figure_of_merit_exact(const NumberState &source, std::uint64_t n_copies, const NumberState &target,
                             std::uint64_t m_copies, const PowerOptions &options = {});

/// The same integral by uniform-grid quadrature. The integrand is a
/// trigonometric polynomial, so any grid with more than twice its degree
/// integrates it exactly; `points == 0` picks the smallest power of two that
/// exceeds 2 (N w_phi + M w_psi) + 1.
double figure_of_merit_quadrature(const NumberState &source, std::uint64_t n_copies, const NumberState &target,
                                  std::uint64_t m_copies, std::size_t points = 0, const PowerOptions &options = {});

/// 1 / sqrt(1 + M sigma_psi^2 / (2 N sigma_phi^2)). Throws zero_variance if sigma_phi^2 == 0.
double figure_of_merit_closed(double sigma_phi_sq, std::uint64_t n_copies, double sigma_psi_sq,
                              std::uint64_t m_copies);

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
};

/// Monte Carlo average of the exact fidelity over exact-mode posterior draws.
McEstimate figure_of_merit_mc(const NumberState &source, std::uint64_t n_copies, const NumberState &target,
                              std::uint64_t m_copies, std::uint64_t draws, std::uint64_t rng_seed,
                              const PowerOptions &options = {});

/// Yield schedule M(N).
class RateSchedule {
   public:
    /// M = ceil(N^a), a in (0, 1].
    static RateSchedule power(double exponent);
    /// M = ceil(c N), c > 0.
    static RateSchedule linear(double slope);
    /// Explicit M values paired index-wise with the N grid.
    static RateSchedule explicit_list(std::vector<std::uint64_t> ms);

    std::uint64_t m_for(std::uint64_t n, std::size_t index) const;
    std::string label() const;

   private:
    enum class Kind { power, linear, list };
    Kind kind_ = Kind::power;
    double param_ = 1.0;
    std::vector<std::uint64_t> list_;
};

struct RateRow {
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    double f_exact = 0.0;
    double f_closed = 0.0;
    double gap = 0.0;  ///< |f_exact - f_closed|
};

enum class RateVerdict { converges, plateaus };
const char *verdict_name(RateVerdict v);

struct RateReport {
    std::vector<RateRow> rows;
    std::string schedule;
    RateVerdict verdict = RateVerdict::plateaus;
};

struct RateOptions {
    /// "converges" needs strictly increasing f_exact ending above this.
    double threshold = 0.95;
    PowerOptions power;
};

RateRow rate_row(const NumberState &source, const NumberState &target, std::uint64_t n, std::uint64_t m,
                 const PowerOptions &options = {});
RateVerdict classify_rates(const std::vector<RateRow> &rows, double threshold);

/// Tabulates exact and closed-form f along the schedule. `n_grid` must be
/// strictly increasing. Throws resource_exhausted if a support exceeds the FFT cap.
RateReport rate_analysis(const NumberState &source, const NumberState &target, const RateSchedule &schedule,
                         const std::vector<std::uint64_t> &n_grid, const RateOptions &options = {});

/// Total-variation distance between the exact posterior and its Gaussian
/// model, by dense uniform-grid quadrature with `points` nodes (0 picks
/// max(2^16, 8 * support) rounded up to a power of two).
double posterior_tv_distance(const PosteriorSpec &spec, std::size_t points = 0);

}  // namespace phaseconv::u1
