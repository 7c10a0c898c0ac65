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

// Mixed targets tau = sum_k t_k |psi_k><psi_k|: strongly-typical type-class
// decomposition of tau^{(x)M}, per-class Gaussian parameters, a finite-M
// lower bound on the preparation fidelity, and a dense-matrix oracle for
// tiny instances.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "phaseconv/distributions.hpp"
#include "phaseconv/u1.hpp"

namespace phaseconv::mixed {

struct MixedComponent {
    double weight;
    u1::NumberState state;
};

class MixedTarget {
   public:
    /// Weights must be positive and sum to 1 within 1e-12; every component gapless.
    static MixedTarget make(std::vector<MixedComponent> components);
    static MixedTarget pure(u1::NumberState state);

    const std::vector<MixedComponent> &components() const noexcept { return components_; }
    std::size_t rank() const noexcept { return components_.size(); }
    /// sum_k t_k sigma_k^2.
    double mean_variance() const noexcept;

   private:
    explicit MixedTarget(std::vector<MixedComponent> c) : components_(std::move(c)) {}
    std::vector<MixedComponent> components_;
};

struct TypeClass {
    std::vector<std::uint64_t> counts;  ///< copies of each component, summing to M
    double weight = 0.0;                ///< multinomial(M; counts) prod t_k^counts_k
    double mu = 0.0;                    ///< per-copy mean of the class number distribution
    double sigma = 0.0;                 ///< per-copy standard deviation
};

struct TypicalDecomposition {
    std::vector<TypeClass> classes;
    double residual_mass = 0.0;  ///< weight of all atypical classes
    double epsilon_used = 0.0;
    std::uint64_t m_copies = 0;
};

/// ((ln M) / M)^{1/4}. Needs M >= 2.
double epsilon_schedule(std::uint64_t m_copies);

/// Type classes k (sum k = M) with ||k/M - t||_1 <= epsilon (1e-12 slack for
/// exactly representable boundaries). Throws combinatorial_blowup when the
/// number of compositions exceeds `max_classes`.
TypicalDecomposition typical_decomposition(const MixedTarget &target, std::uint64_t m_copies, double epsilon,
                                           std::size_t max_classes = 1'000'000);

struct ClassGaussian {
    double mu = 0.0;
    double sigma = 0.0;
};

/// (sum_k (n_k/M) mu_k, sqrt(sum_k (n_k/M) sigma_k^2)).
ClassGaussian typeclass_gaussian(const MixedTarget &target, const std::vector<std::uint64_t> &counts,
                                 std::uint64_t m_copies);

/// How each class fidelity F(beta_j, beta_j(gamma)) is evaluated.
enum class ClassFidelity {
    gaussian,  ///< exp(-M sigma_j^2 gamma^2)
    exact,     ///< prod_k |char_fn(psi_k, gamma)|^{2 n_k}
};

/// (1 - delta)^2 min_j F_j(gamma). Root fidelity is jointly concave, so
/// sqrt F(tau^M, tau^M_gamma) >= sum_j r_j sqrt F_j >= (1 - delta) sqrt(min_j F_j).
/// Zero if no class is typical.
double fidelity_lower_bound(const TypicalDecomposition &decomposition, const MixedTarget &target, double gamma,
                            ClassFidelity mode = ClassFidelity::gaussian);

double fidelity_mixed_lower_bound(const MixedTarget &target, std::uint64_t m_copies, double gamma, double epsilon,
                                  ClassFidelity mode = ClassFidelity::gaussian,
                                  std::size_t max_classes = 1'000'000);

struct MixedBoundOptions {
    /// Defaults to epsilon_schedule(M).
    std::optional<double> epsilon;
    ClassFidelity mode = ClassFidelity::gaussian;
    /// Uniform grid size; 0 picks max(8192, 8 * N-copy support) rounded to a power of two.
    std::size_t quadrature_points = 0;
    std::size_t max_classes = 1'000'000;
    PowerOptions power;
};

/// Integral of posterior_density_exact times the fidelity lower bound.
double figure_of_merit_mixed_bound(const u1::NumberState &source, std::uint64_t n_copies, const MixedTarget &target,
                                   std::uint64_t m_copies, const MixedBoundOptions &options = {});

/// Hermitian, positive semidefinite, unit trace (tolerances 1e-12, 1e-10, 1e-10).
class DensityMatrix {
   public:
    static DensityMatrix make(Eigen::MatrixXcd entries);
    static DensityMatrix pure(const Eigen::VectorXcd &state);

    Eigen::Index dimension() const noexcept { return m_.rows(); }
    const Eigen::MatrixXcd &matrix() const noexcept { return m_; }

   private:
    friend DensityMatrix tensor(const DensityMatrix &, const DensityMatrix &);
    explicit DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {}
    Eigen::MatrixXcd m_;
};

DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b);

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 computed as ||A^dag B||_1^2 with
/// rho = A A^dag and sigma = B B^dag from Hermitian eigendecompositions;
/// eigenvalues below 8 * dim * eps * lambda_max are treated as zero.
double uhlmann_fidelity(const DensityMatrix &rho, const DensityMatrix &sigma);

/// tau rotated by gamma, with component k embedded as
/// sum_n sqrt(p^(k)_n) |n> (x) |k> (multiplicity label k keeps the
/// components orthonormal). Dimension (n_max + 1) * rank; throws
/// cap_exceeded above `dim_cap`.
DensityMatrix target_density(const MixedTarget &target, double gamma, std::size_t dim_cap = 8);

/// Dense F(tau^{(x)M}, tau_gamma^{(x)M}) for M <= 3. Throws precision_loss if
/// it disagrees with F(tau, tau_gamma)^M by more than 1e-8.
double exact_mixed_fidelity_small(const MixedTarget &target, std::uint64_t m_copies, double gamma,
                                  std::size_t dim_cap = 8);

}  // namespace phaseconv::mixed
