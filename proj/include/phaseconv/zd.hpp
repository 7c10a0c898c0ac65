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

// Z_d estimation: N copies of sum_j sqrt(p_j)|j> reduce to a canonical
// representative sum_j sqrt(c_j)|j>, which is measured in the basis
// |eta_m> = d^{-1/2} sum_j omega^{m j} |j>, omega = exp(2 pi i / d).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace phaseconv::zd {

/// Normalized amplitude vector over Z_d.
class CyclicState {
   public:
    /// sqrt(p_j) amplitudes; `p` must be a probability vector of length d >= 2.
    static CyclicState from_probs(std::span<const double> p);
    /// |eta_m>; eta_0 is the uniform superposition.
    static CyclicState eta(std::size_t d, std::int64_t m);
    /// Throws invalid_argument unless sum |a_j|^2 is within 1e-12 of 1.
    static CyclicState from_amplitudes(std::vector<std::complex<double>> amplitudes);

    std::size_t d() const noexcept { return amps_.size(); }
    std::span<const std::complex<double>> amplitudes() const noexcept { return amps_; }

   private:
    explicit CyclicState(std::vector<std::complex<double>> a) : amps_(std::move(a)) {}
    std::vector<std::complex<double>> amps_;
};

struct CyclicCoeffs {
    std::size_t d = 0;
    std::vector<double> c;
    /// Contraction rate of the generating p.
    double epsilon = 0.0;
    /// c_j - 1/d, accumulated from the k != 0 Fourier terms only (accurate
    /// even when it is far below the double resolution of c_j).
    std::vector<double> deviation;
};

/// max_{k != 0} |sum_j p_j omega^{k j}|. Below 1 iff p has >= 2 nonzero entries.
double contraction_rate(std::span<const double> p);

/// c_j = Pr(sum of N draws from p == j mod d), via inverse DFT of the N-th
/// powers of DFT(p).
CyclicCoeffs canonical_coeffs(std::span<const double> p, std::uint64_t copies);

/// Definitional oracle: sums prod p_{t_i} over all d^N tuples grouped by the
/// residue of their coordinate sum. Throws cap_exceeded if d^N > max_tuples.
std::vector<double> brute_force_coeffs(std::span<const double> p, std::uint64_t copies,
                                       std::uint64_t max_tuples = std::uint64_t{1} << 22);

/// Pr(m1 | m) for m1 = 0..d-1 when the frame is shifted by `m_true`:
/// (1/d) |sum_j omega^{(m - m1) j} sqrt(c_j)|^2. `d` must equal p.size().
std::vector<double> outcome_distribution(std::span<const double> p, std::uint64_t copies, std::size_t d,
                                         std::int64_t m_true);

/// Same for an explicit state (no copy reduction).
std::vector<double> outcome_distribution(const CyclicState &state, std::int64_t m_true);

/// Pr(m | m) = 1 - failure_probability.
double success_probability(std::span<const double> p, std::uint64_t copies, std::size_t d);

/// sum_{m1 != m} Pr(m1 | m), evaluated from the coefficient deviations so
/// that values far below 1e-16 keep their relative accuracy.
double failure_probability(std::span<const double> p, std::uint64_t copies, std::size_t d);

struct RateFit {
    double slope = 0.0;      ///< d ln(failure) / dN
    double intercept = 0.0;  ///< ln of the fitted prefactor
};

/// Least-squares line through (N, ln failure_probability(p, N)).
RateFit fit_failure_rate(std::span<const double> p, std::size_t d, std::span<const std::uint64_t> copies);

}  // namespace phaseconv::zd
