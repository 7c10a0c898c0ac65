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

#include "phaseconv/u1.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phaseconv/error.hpp"
#include "phaseconv/fft.hpp"

namespace phaseconv::u1 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> amplitudes(const IntDistribution &p) {
    std::vector<double> a(p.size());
    std::transform(p.probs().begin(), p.probs().end(), a.begin(), [](double x) { return std::sqrt(x); });
    return a;
}

double wrap_angle(double x) {
    double g = std::remainder(x, kTwoPi);
    if (g <= -std::numbers::pi) g += kTwoPi;
    return g;
}

// Rounds c * n^a up to an integer, treating values within 1e-9 relative of an
// integer as that integer (pow(1e5, 0.8) is 10000.000000000002).
std::uint64_t ceil_snapped(double x) {
    const double r = std::round(x);
    const double m = std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : std::ceil(x);
    return static_cast<std::uint64_t>(std::max(1.0, m));
}

}  // namespace

NumberState standardize(const IntDistribution &raw_spectrum, const StandardizeOptions &options) {
    if (raw_spectrum.offset() < 0) {
        throw Error(ErrorCode::negative_offset, "number spectra must be bounded below by 0 (offset " +
                                                    std::to_string(raw_spectrum.offset()) + ")");
    }
    const auto probs = raw_spectrum.probs();
    const IntDistribution kept = raw_spectrum.trimmed(options.truncation);
    double kept_raw = 0.0;
    for (std::int64_t n = kept.offset(); n <= kept.last(); ++n) kept_raw += raw_spectrum.at(n);
    const double truncated = std::max(0.0, 1.0 - kept_raw);

    const auto kp = kept.probs();
    const bool gapless = std::none_of(kp.begin(), kp.end(), [](double x) { return x == 0.0; });
    if (!gapless && !options.allow_gapped) {
        std::ostringstream os;
        os << "number spectrum has a gap (support of " << probs.size() << " points starting at "
           << raw_spectrum.offset() << " contains zero mass)";
        throw Error(ErrorCode::gapped_spectrum, os.str());
    }
    return NumberState(kept, gapless, truncated);
}

PosteriorSpec PosteriorSpec::make(const NumberState &source, std::uint64_t copies, const PowerOptions &options) {
    if (copies == 0) throw Error(ErrorCode::invalid_argument, "need at least one source copy");
    const double n = static_cast<double>(copies);
    return PosteriorSpec{power_convolve(source.spectrum(), copies, options), copies, n * source.mean(),
                         n * source.variance()};
}

double posterior_density_exact(const PosteriorSpec &spec, double gamma) {
    return std::norm(amp_char_fn(spec.ncopy_spectrum, gamma)) / kTwoPi;
}

double posterior_density_gauss(const PosteriorSpec &spec, double gamma) {
    if (!(spec.variance > 0.0)) throw Error(ErrorCode::zero_variance, "Gaussian posterior needs sigma_phi^2 > 0");
    const double s = 2.0 * spec.variance;
    return std::sqrt(s / std::numbers::pi) * std::exp(-s * gamma * gamma);
}

double born_joint_density(const PosteriorSpec &spec, double theta0, double theta) {
    // <eta| U(theta)^dag : coefficients e^{-i n theta}; U(theta0)|phi^N> : sqrt(P_n) e^{i n theta0}.
    std::complex<double> overlap = 0.0;
    const auto &p = spec.ncopy_spectrum;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double n = static_cast<double>(p.offset() + static_cast<std::int64_t>(i));
        const auto bra = std::polar(1.0, -n * theta);
        const auto ket = std::sqrt(p.probs()[i]) * std::polar(1.0, n * theta0);
        overlap += bra * ket;
    }
    return std::norm(overlap) / (kTwoPi * kTwoPi);
}

PosteriorSampler::PosteriorSampler(const PosteriorSpec &spec, SampleMode mode, std::size_t grid_points)
    : mode_(mode) {
    if (mode == SampleMode::gauss) {
        if (!(spec.variance > 0.0)) throw Error(ErrorCode::zero_variance, "Gaussian sampling needs sigma_phi^2 > 0");
        gauss_stddev_ = 1.0 / (2.0 * std::sqrt(spec.variance));
        return;
    }
    std::size_t k = grid_points ? grid_points : std::max<std::size_t>(4096, 4 * spec.ncopy_spectrum.size());
    k = std::bit_ceil(std::max<std::size_t>(k, 2));
    const auto amp = amplitudes(spec.ncopy_spectrum);
    const auto values = fourier_series_on_grid(spec.ncopy_spectrum.offset(), amp, k);
    const double h = kTwoPi / static_cast<double>(k);
    cdf_.assign(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double left = std::norm(values[i]);
        const double right = std::norm(values[(i + 1) % k]);
        cdf_[i + 1] = cdf_[i] + 0.5 * h * (left + right) / kTwoPi;
    }
    const double total = cdf_.back();
    for (auto &c : cdf_) c /= total;
    cdf_.back() = 1.0;
}

double PosteriorSampler::draw(Rng &rng) const {
    if (mode_ == SampleMode::gauss) return wrap_angle(gauss_stddev_ * rng.normal());
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t hi = static_cast<std::size_t>(std::distance(cdf_.begin(), it));
    const std::size_t lo = hi - 1;
    const double span = cdf_[hi] - cdf_[lo];
    const double frac = span > 0.0 ? (u - cdf_[lo]) / span : 0.5;
    const double h = kTwoPi / static_cast<double>(cdf_.size() - 1);
    return wrap_angle(-std::numbers::pi + (static_cast<double>(lo) + frac) * h);
}

double sample_gamma(const PosteriorSpec &spec, std::uint64_t rng_seed, SampleMode mode) {
    Rng rng(rng_seed);
    return PosteriorSampler(spec, mode).draw(rng);
}

double fidelity_from_ncopy(const IntDistribution &ncopy_target, double gamma) {
    return std::min(1.0, std::norm(char_fn(ncopy_target, gamma)));
}

double fidelity_pure_exact(const NumberState &target, std::uint64_t copies, double gamma) {
    return fidelity_from_ncopy(power_convolve(target.spectrum(), copies), gamma);
}

double fidelity_pure_gauss(double sigma_sq, std::uint64_t copies, double gamma) {
    if (sigma_sq < 0.0) throw Error(ErrorCode::invalid_argument, "variance must be nonnegative");
    return std::exp(-static_cast<double>(copies) * sigma_sq * gamma * gamma);
}

double figure_of_merit_exact(const NumberState &source, std::uint64_t n_copies, const NumberState &target,
                             std::uint64_t m_copies, const PowerOptions &options) {
    const auto p = power_convolve(source.spectrum(), n_copies, options);
    const auto q = power_convolve(target.spectrum(), m_copies, options);
    const auto a = fft::autocorrelation(amplitudes(p));
    const auto b = fft::autocorrelation({q.probs().begin(), q.probs().end()});
    const std::size_t common = std::min(a.size(), b.size());
    double tail = 0.0;
    for (std::size_t k = common; k-- > 1;) tail += a[k] * b[k];
    return std::clamp(a[0] * b[0] + 2.0 * tail, 0.0, 1.0);
}

double figure_of_merit_quadrature(const NumberState &source, std::uint64_t n_copies, const NumberState &target,
                                  std::uint64_t m_copies, std::size_t points, const PowerOptions &options) {
    const auto p = power_convolve(source.spectrum(), n_copies, options);
    const auto q = power_convolve(target.spectrum(), m_copies, options);
    const std::size_t degree = (p.size() - 1) + (q.size() - 1);
    const std::size_t k = points ? points : std::bit_ceil(2 * degree + 2);
    const auto amp = fourier_series_on_grid(p.offset(), amplitudes(p), k);
    const auto chr = fourier_series_on_grid(q.offset(), q.probs(), k);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::norm(amp[i]) * std::norm(chr[i]);
    return sum / static_cast<double>(k);
}

double figure_of_merit_closed(double sigma_phi_sq, std::uint64_t n_copies, double sigma_psi_sq,
                              std::uint64_t m_copies) {
    if (!(sigma_phi_sq > 0.0)) throw Error(ErrorCode::zero_variance, "closed form needs sigma_phi^2 > 0");
    const double ratio =
        static_cast<double>(m_copies) * sigma_psi_sq / (2.0 * static_cast<double>(n_copies) * sigma_phi_sq);
    return 1.0 / std::sqrt(1.0 + ratio);
}

McEstimate figure_of_merit_mc(const NumberState &source, std::uint64_t n_copies, const NumberState &target,
                              std::uint64_t m_copies, std::uint64_t draws, std::uint64_t rng_seed,
                              const PowerOptions &options) {
    if (draws < 100) throw Error(ErrorCode::invalid_argument, "Monte Carlo needs at least 100 draws");
    const auto spec = PosteriorSpec::make(source, n_copies, options);
    const auto q = power_convolve(target.spectrum(), m_copies, options);
    const PosteriorSampler sampler(spec, SampleMode::exact);
    Rng rng(rng_seed);
    // Welford
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        const double x = fidelity_from_ncopy(q, sampler.draw(rng));
        const double delta = x - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (x - mean);
    }
    const double var = m2 / static_cast<double>(draws - 1);
    return {mean, std::sqrt(var / static_cast<double>(draws))};
}

RateSchedule RateSchedule::power(double exponent) {
    if (!(exponent > 0.0 && exponent <= 1.0)) throw Error(ErrorCode::invalid_argument, "rate exponent must be in (0, 1]");
    RateSchedule s;
    s.kind_ = Kind::power;
    s.param_ = exponent;
    return s;
}

RateSchedule RateSchedule::linear(double slope) {
    if (!(slope > 0.0)) throw Error(ErrorCode::invalid_argument, "rate slope must be positive");
    RateSchedule s;
    s.kind_ = Kind::linear;
    s.param_ = slope;
    return s;
}

RateSchedule RateSchedule::explicit_list(std::vector<std::uint64_t> ms) {
    if (ms.empty()) throw Error(ErrorCode::invalid_argument, "explicit M list is empty");
    if (std::find(ms.begin(), ms.end(), 0u) != ms.end()) throw Error(ErrorCode::invalid_argument, "M values must be >= 1");
    RateSchedule s;
    s.kind_ = Kind::list;
    s.list_ = std::move(ms);
    return s;
}

std::uint64_t RateSchedule::m_for(std::uint64_t n, std::size_t index) const {
    switch (kind_) {
        case Kind::power:
            return ceil_snapped(std::pow(static_cast<double>(n), param_));
        case Kind::linear:
            return ceil_snapped(param_ * static_cast<double>(n));
        case Kind::list:
            if (index >= list_.size()) throw Error(ErrorCode::invalid_argument, "explicit M list shorter than N grid");
            return list_[index];
    }
    return 1;
}

std::string RateSchedule::label() const {
    std::ostringstream os;
    os.precision(12);
    switch (kind_) {
        case Kind::power:
            os << "M=ceil(N^" << param_ << ")";
            break;
        case Kind::linear:
            os << "M=ceil(" << param_ << "*N)";
            break;
        case Kind::list:
            os << "M=explicit";
            break;
    }
    return os.str();
}

const char *verdict_name(RateVerdict v) { return v == RateVerdict::converges ? "converges" : "plateaus"; }

RateRow rate_row(const NumberState &source, const NumberState &target, std::uint64_t n, std::uint64_t m,
                 const PowerOptions &options) {
    RateRow row{n, m, figure_of_merit_exact(source, n, target, m, options), 0.0, 0.0};
    row.f_closed = figure_of_merit_closed(source.variance(), n, target.variance(), m);
    row.gap = std::abs(row.f_exact - row.f_closed);
    return row;
}

RateVerdict classify_rates(const std::vector<RateRow> &rows, double threshold) {
    if (rows.empty()) return RateVerdict::plateaus;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i].f_exact > rows[i - 1].f_exact)) return RateVerdict::plateaus;
    }
    return rows.back().f_exact > threshold ? RateVerdict::converges : RateVerdict::plateaus;
}

RateReport rate_analysis(const NumberState &source, const NumberState &target, const RateSchedule &schedule,
                         const std::vector<std::uint64_t> &n_grid, const RateOptions &options) {
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
        if (n_grid[i] <= n_grid[i - 1]) throw Error(ErrorCode::invalid_argument, "N grid must be strictly increasing");
    }
    RateReport report;
    report.schedule = schedule.label();
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        report.rows.push_back(rate_row(source, target, n_grid[i], schedule.m_for(n_grid[i], i), options.power));
    }
    report.verdict = classify_rates(report.rows, options.threshold);
    return report;
}

double posterior_tv_distance(const PosteriorSpec &spec, std::size_t points) {
    const std::size_t k =
        std::bit_ceil(points ? points : std::max<std::size_t>(std::size_t{1} << 16, 8 * spec.ncopy_spectrum.size()));
    const auto amp = fourier_series_on_grid(spec.ncopy_spectrum.offset(), amplitudes(spec.ncopy_spectrum), k);
    const double h = kTwoPi / static_cast<double>(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double gamma = -std::numbers::pi + static_cast<double>(i) * h;
        sum += std::abs(std::norm(amp[i]) / kTwoPi - posterior_density_gauss(spec, gamma));
    }
    return 0.5 * sum * h;
}

}  // namespace phaseconv::u1
