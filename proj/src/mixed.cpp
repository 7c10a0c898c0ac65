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

#include "phaseconv/mixed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "phaseconv/error.hpp"

namespace phaseconv::mixed {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double compositions_count(std::uint64_t m, std::size_t parts) {
    // C(m + parts - 1, parts - 1) in floating point; only compared against a cap.
    double c = 1.0;
    for (std::size_t i = 1; i < parts; ++i) c = c * static_cast<double>(m + i) / static_cast<double>(i);
    return c;
}

template <class Visit>
void for_each_composition(std::uint64_t m, std::size_t parts, Visit &&visit) {
    std::vector<std::uint64_t> counts(parts, 0);
    auto rec = [&](auto &self, std::size_t index, std::uint64_t remaining) -> void {
        if (index + 1 == parts) {
            counts[index] = remaining;
            visit(counts);
            return;
        }
        for (std::uint64_t k = 0; k <= remaining; ++k) {
            counts[index] = k;
            self(self, index + 1, remaining - k);
        }
    };
    rec(rec, 0, m);
}

double log_multinomial_weight(const std::vector<std::uint64_t> &counts, const std::vector<double> &log_t,
                              std::uint64_t m) {
    double lw = std::lgamma(static_cast<double>(m) + 1.0);
    for (std::size_t k = 0; k < counts.size(); ++k) {
        lw -= std::lgamma(static_cast<double>(counts[k]) + 1.0);
        if (counts[k] > 0) lw += static_cast<double>(counts[k]) * log_t[k];
    }
    return lw;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// rho = A A^dag with A = V_+ diag(sqrt(lambda_+)).
Eigen::MatrixXcd psd_factor(const Eigen::MatrixXcd &rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
    const auto &lambda = eig.eigenvalues();
    const double top = std::max(lambda.maxCoeff(), 0.0);
    const double floor = 8.0 * static_cast<double>(rho.rows()) * std::numeric_limits<double>::epsilon() * top;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) > floor) keep.push_back(i);
    }
    Eigen::MatrixXcd a(rho.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        a.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]) * std::sqrt(lambda(keep[c]));
    }
    return a;
}

}  // namespace

MixedTarget MixedTarget::make(std::vector<MixedComponent> components) {
    if (components.empty()) throw Error(ErrorCode::invalid_argument, "mixed target needs at least one component");
    double total = 0.0;
    for (const auto &c : components) {
        if (!(c.weight > 0.0)) throw Error(ErrorCode::invalid_argument, "component weights must be positive");
        if (!c.state.gapless()) throw Error(ErrorCode::gapped_spectrum, "mixed target component has a gapped spectrum");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(12);
        os << "component weights sum to " << total << ", expected 1";
        throw Error(ErrorCode::invalid_argument, os.str());
    }
    for (auto &c : components) c.weight /= total;
    return MixedTarget(std::move(components));
}

MixedTarget MixedTarget::pure(u1::NumberState state) { return MixedTarget({MixedComponent{1.0, std::move(state)}}); }

double MixedTarget::mean_variance() const noexcept {
    double s = 0.0;
    for (const auto &c : components_) s += c.weight * c.state.variance();
    return s;
}

double epsilon_schedule(std::uint64_t m_copies) {
    if (m_copies < 2) throw Error(ErrorCode::invalid_argument, "epsilon schedule needs M >= 2");
    const double m = static_cast<double>(m_copies);
    return std::pow(std::log(m) / m, 0.25);
}

ClassGaussian typeclass_gaussian(const MixedTarget &target, const std::vector<std::uint64_t> &counts,
                                 std::uint64_t m_copies) {
    if (counts.size() != target.rank()) throw Error(ErrorCode::invalid_argument, "counts length must equal the rank");
    if (std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) != m_copies) {
        throw Error(ErrorCode::invalid_argument, "counts must sum to M");
    }
    ClassGaussian g;
    double var = 0.0;
    const double m = static_cast<double>(m_copies);
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double frac = static_cast<double>(counts[k]) / m;
        g.mu += frac * target.components()[k].state.mean();
        var += frac * target.components()[k].state.variance();
    }
    g.sigma = std::sqrt(var);
    return g;
}

TypicalDecomposition typical_decomposition(const MixedTarget &target, std::uint64_t m_copies, double epsilon,
                                           std::size_t max_classes) {
    if (m_copies == 0) throw Error(ErrorCode::invalid_argument, "need at least one target copy");
    if (!(epsilon >= 0.0 && epsilon <= 2.0)) throw Error(ErrorCode::invalid_argument, "epsilon must lie in [0, 2]");
    const std::size_t rank = target.rank();
    if (compositions_count(m_copies, rank) > static_cast<double>(max_classes)) {
        std::ostringstream os;
        os << "type-class enumeration for M=" << m_copies << ", rank " << rank << " exceeds cap " << max_classes;
        throw Error(ErrorCode::combinatorial_blowup, os.str());
    }

    std::vector<double> t(rank), log_t(rank);
    for (std::size_t k = 0; k < rank; ++k) {
        t[k] = target.components()[k].weight;
        log_t[k] = std::log(t[k]);
    }
    const double m = static_cast<double>(m_copies);

    TypicalDecomposition out;
    out.epsilon_used = epsilon;
    out.m_copies = m_copies;
    // Atypical weights are summed directly: 1 - sum(typical) would bottom out at ~1e-16.
    double residual = 0.0, residual_c = 0.0;
    for_each_composition(m_copies, rank, [&](const std::vector<std::uint64_t> &counts) {
        double dist = 0.0;
        for (std::size_t k = 0; k < rank; ++k) dist += std::abs(static_cast<double>(counts[k]) / m - t[k]);
        const double w = std::exp(log_multinomial_weight(counts, log_t, m_copies));
        if (dist <= epsilon + 1e-12) {
            const auto g = typeclass_gaussian(target, counts, m_copies);
            out.classes.push_back(TypeClass{counts, w, g.mu, g.sigma});
        } else {
            const double y = w - residual_c;
            const double s = residual + y;
            residual_c = (s - residual) - y;
            residual = s;
        }
    });
    out.residual_mass = std::clamp(residual, 0.0, 1.0);
    return out;
}

double fidelity_lower_bound(const TypicalDecomposition &decomposition, const MixedTarget &target, double gamma,
                            ClassFidelity mode) {
    if (decomposition.classes.empty()) return 0.0;
    const double m = static_cast<double>(decomposition.m_copies);
    double worst = 1.0;
    if (mode == ClassFidelity::gaussian) {
        double max_var = 0.0;
        for (const auto &c : decomposition.classes) max_var = std::max(max_var, c.sigma * c.sigma);
        worst = std::exp(-m * max_var * gamma * gamma);
    } else {
        std::vector<double> moduli(target.rank());
        for (std::size_t k = 0; k < target.rank(); ++k) {
            moduli[k] = std::min(1.0, std::abs(char_fn(target.components()[k].state.spectrum(), gamma)));
        }
        for (const auto &c : decomposition.classes) {
            double f = 1.0;
            for (std::size_t k = 0; k < moduli.size(); ++k) f *= std::pow(moduli[k], 2.0 * static_cast<double>(c.counts[k]));
            worst = std::min(worst, f);
        }
    }
    const double kept = std::max(0.0, 1.0 - decomposition.residual_mass);
    return std::clamp(kept * kept * worst, 0.0, 1.0);
}

double fidelity_mixed_lower_bound(const MixedTarget &target, std::uint64_t m_copies, double gamma, double epsilon,
                                  ClassFidelity mode, std::size_t max_classes) {
    return fidelity_lower_bound(typical_decomposition(target, m_copies, epsilon, max_classes), target, gamma, mode);
}

double figure_of_merit_mixed_bound(const u1::NumberState &source, std::uint64_t n_copies, const MixedTarget &target,
                                   std::uint64_t m_copies, const MixedBoundOptions &options) {
    const double eps = options.epsilon ? *options.epsilon : epsilon_schedule(m_copies);
    const auto decomposition = typical_decomposition(target, m_copies, eps, options.max_classes);
    const auto spec = u1::PosteriorSpec::make(source, n_copies, options.power);

    const std::size_t k = std::bit_ceil(
        options.quadrature_points ? options.quadrature_points
                                  : std::max<std::size_t>(8192, 8 * spec.ncopy_spectrum.size()));
    std::vector<double> amp(spec.ncopy_spectrum.size());
    std::transform(spec.ncopy_spectrum.probs().begin(), spec.ncopy_spectrum.probs().end(), amp.begin(),
                   [](double x) { return std::sqrt(x); });
    const auto values = fourier_series_on_grid(spec.ncopy_spectrum.offset(), amp, k);
    const double h = kTwoPi / static_cast<double>(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double gamma = -std::numbers::pi + static_cast<double>(i) * h;
        sum += std::norm(values[i]) / kTwoPi * fidelity_lower_bound(decomposition, target, gamma, options.mode);
    }
    return std::clamp(sum * h, 0.0, 1.0);
}

DensityMatrix DensityMatrix::make(Eigen::MatrixXcd entries) {
    if (entries.rows() == 0 || entries.rows() != entries.cols()) {
        throw Error(ErrorCode::dimension_mismatch, "density matrix must be square and nonempty");
    }
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw Error(ErrorCode::not_psd, "density matrix is not Hermitian");
    }
    if (std::abs(entries.trace() - std::complex<double>(1.0, 0.0)) > 1e-10) {
        throw Error(ErrorCode::invalid_argument, "density matrix trace is not 1");
    }
    const Eigen::MatrixXcd herm = 0.5 * (entries + entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10) throw Error(ErrorCode::not_psd, "density matrix has a negative eigenvalue");
    return DensityMatrix(herm);
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd &state) {
    const double n = state.norm();
    if (!(n > 0.0)) throw Error(ErrorCode::invalid_argument, "zero state vector");
    const Eigen::VectorXcd v = state / n;
    return make(v * v.adjoint());
}

DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b) { return DensityMatrix(kron(a.matrix(), b.matrix())); }

double uhlmann_fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.dimension() != sigma.dimension()) throw Error(ErrorCode::dimension_mismatch, "fidelity needs equal dimensions");
    const Eigen::MatrixXcd a = psd_factor(rho.matrix());
    const Eigen::MatrixXcd b = psd_factor(sigma.matrix());
    if (a.cols() == 0 || b.cols() == 0) return 0.0;
    const Eigen::MatrixXcd overlap = a.adjoint() * b;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(overlap);
    const double nuclear = svd.singularValues().sum();
    return std::clamp(nuclear * nuclear, 0.0, 1.0);
}

DensityMatrix target_density(const MixedTarget &target, double gamma, std::size_t dim_cap) {
    std::int64_t n_max = 0;
    for (const auto &c : target.components()) n_max = std::max(n_max, c.state.spectrum().last());
    const auto levels = static_cast<std::size_t>(n_max + 1);
    const std::size_t dim = levels * target.rank();
    if (dim > dim_cap) {
        std::ostringstream os;
        os << "embedding dimension " << dim << " exceeds cap " << dim_cap;
        throw Error(ErrorCode::cap_exceeded, os.str());
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < target.rank(); ++k) {
        const auto &comp = target.components()[k];
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
        const auto &spec = comp.state.spectrum();
        for (std::int64_t n = spec.offset(); n <= spec.last(); ++n) {
            const auto idx = static_cast<Eigen::Index>(k * levels + static_cast<std::size_t>(n));
            v(idx) = std::sqrt(spec.at(n)) * std::polar(1.0, static_cast<double>(n) * gamma);
        }
        rho += comp.weight * (v * v.adjoint());
    }
    return DensityMatrix::make(rho);
}

double exact_mixed_fidelity_small(const MixedTarget &target, std::uint64_t m_copies, double gamma,
                                  std::size_t dim_cap) {
    if (m_copies == 0 || m_copies > 3) throw Error(ErrorCode::invalid_argument, "dense oracle supports 1 <= M <= 3");
    const auto tau = target_density(target, 0.0, dim_cap);
    const auto rotated = target_density(target, gamma, dim_cap);
    const double single = uhlmann_fidelity(tau, rotated);

    DensityMatrix a = tau, b = rotated;
    for (std::uint64_t i = 1; i < m_copies; ++i) {
        a = tensor(a, tau);
        b = tensor(b, rotated);
    }
    const double joint = uhlmann_fidelity(a, b);
    const double expected = std::pow(single, static_cast<double>(m_copies));
    if (std::abs(joint - expected) > 1e-8) {
        std::ostringstream os;
        os.precision(12);
        os << "tensor-power fidelity " << joint << " disagrees with F^M = " << expected;
        throw Error(ErrorCode::precision_loss, os.str());
    }
    return joint;
}

}  // namespace phaseconv::mixed
