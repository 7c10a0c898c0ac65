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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "phaseconv/error.hpp"
#include "phaseconv/mixed.hpp"

using namespace phaseconv;
using namespace phaseconv::mixed;

namespace {

u1::NumberState state(std::vector<double> p, std::int64_t offset = 0) {
    return u1::standardize(IntDistribution::from_probs(offset, std::move(p)));
}

MixedTarget two_fair(double t0 = 0.5) {
    return MixedTarget::make({{t0, state({0.5, 0.5})}, {1.0 - t0, state({0.5, 0.5}, 2)}});
}

ErrorCode code_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::validation;
}

struct Normal {
    std::mt19937_64 &rng;
    std::normal_distribution<double> dist{0.0, 1.0};
    double operator()() { return dist(rng); }
};

}  // namespace

TEST(MixedTarget, Validation) {
    EXPECT_EQ(code_of([] { MixedTarget::make({{0.6, state({0.5, 0.5})}, {0.3, state({1.0})}}); }),
              ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([] { MixedTarget::make({}); }), ErrorCode::invalid_argument);
    const auto t = two_fair(0.25);
    EXPECT_EQ(t.rank(), 2u);
    EXPECT_DOUBLE_EQ(t.mean_variance(), 0.25);
}

TEST(EpsilonSchedule, ReferenceValues) {
    EXPECT_NEAR(epsilon_schedule(16), std::pow(std::log(16.0) / 16.0, 0.25), 1e-15);
    EXPECT_NEAR(epsilon_schedule(16), 0.645196, 5e-7);
    double prev = 0.0;
    for (double m : {1e2, 1e4, 1e6}) {
        const double ratio = epsilon_schedule(static_cast<std::uint64_t>(m)) / std::sqrt(std::log(m) / m);
        EXPECT_GT(ratio, prev);
        prev = ratio;
    }
    EXPECT_THROW(epsilon_schedule(1), Error);
}

TEST(TypicalDecomposition, ReferenceValues) {
    const auto pure = MixedTarget::pure(state({0.3, 0.7}));
    for (double eps : {0.0, 0.3}) {
        const auto d = typical_decomposition(pure, 9, eps);
        ASSERT_EQ(d.classes.size(), 1u);
        EXPECT_EQ(d.residual_mass, 0.0);
    }

    const auto d = typical_decomposition(two_fair(), 4, 0.5);
    std::map<std::vector<std::uint64_t>, double> got;
    for (const auto &c : d.classes) got[c.counts] = c.weight;
    const std::map<std::vector<std::uint64_t>, double> want = {{{1, 3}, 0.25}, {{2, 2}, 0.375}, {{3, 1}, 0.25}};
    ASSERT_EQ(got.size(), want.size());
    for (const auto &[k, w] : want) EXPECT_NEAR(got.at(k), w, 1e-15);
    EXPECT_NEAR(d.residual_mass, 0.125, 1e-15);

    EXPECT_EQ(typical_decomposition(two_fair(), 4, 2.0).residual_mass, 0.0);
}

TEST(TypicalDecomposition, WeightsMatchMultinomialEnumeration) {
    const auto target = MixedTarget::make({{0.2, state({0.5, 0.5})}, {0.5, state({0.3, 0.7})}, {0.3, state({1.0}, 4)}});
    const std::vector<double> t = {0.2, 0.5, 0.3};
    for (std::uint64_t m = 1; m <= 12; ++m) {
        for (double eps : {0.3, 0.7, 2.0}) {
            const auto d = typical_decomposition(target, m, eps);
            std::map<std::vector<std::uint64_t>, double> got;
            double total = d.residual_mass;
            for (const auto &c : d.classes) {
                got[c.counts] = c.weight;
                total += c.weight;
            }
            EXPECT_NEAR(total, 1.0, 1e-12);
            double residual = 0.0;
            oracle::for_each_composition(t, m, [&](const std::vector<std::uint64_t> &k, double w) {
                double dist = 0.0;
                for (std::size_t i = 0; i < t.size(); ++i) dist += std::abs(double(k[i]) / m - t[i]);
                if (dist <= eps + 1e-12) {
                    ASSERT_TRUE(got.count(k));
                    EXPECT_NEAR(got[k], w, 1e-14 * std::max(1.0, w));
                } else {
                    EXPECT_FALSE(got.count(k));
                    residual += w;
                }
            });
            EXPECT_NEAR(d.residual_mass, residual, 1e-14);
        }
    }
}

TEST(TypicalDecomposition, ResidualShrinksUnderSchedule) {
    double prev = 1.0;
    for (std::uint64_t m : {16u, 64u, 256u, 1024u}) {
        const double delta = typical_decomposition(two_fair(), m, epsilon_schedule(m)).residual_mass;
        EXPECT_LT(delta, prev);
        prev = delta;
    }
}

TEST(TypicalDecomposition, CombinatorialCap) {
    const auto target = MixedTarget::make({{0.25, state({0.5, 0.5})}, {0.25, state({0.5, 0.5})},
                                           {0.25, state({0.5, 0.5})}, {0.25, state({0.5, 0.5})}});
    EXPECT_EQ(code_of([&] { typical_decomposition(target, 400, 0.5, 1000); }), ErrorCode::combinatorial_blowup);
}

TEST(TypeclassGaussian, ReferenceValues) {
    const auto s = state({0.2, 0.5, 0.3}, 1);
    const auto g = typeclass_gaussian(MixedTarget::pure(s), {5}, 5);
    EXPECT_NEAR(g.mu, s.mean(), 1e-15);
    EXPECT_NEAR(g.sigma, std::sqrt(s.variance()), 1e-15);
    EXPECT_NEAR(typeclass_gaussian(two_fair(), {2, 2}, 4).sigma, 0.5, 1e-15);
}

TEST(TypeclassGaussian, MatchesConvolutionOracle) {
    const std::vector<double> a = {0.2, 0.8}, b = {0.1, 0.3, 0.6};
    const auto target = MixedTarget::make({{0.4, state(a)}, {0.6, state(b)}});
    for (std::uint64_t na = 0; na <= 5; ++na) {
        for (std::uint64_t nb = 0; nb <= 5; ++nb) {
            if (na + nb == 0) continue;
            std::vector<double> comp = {1.0};
            for (std::uint64_t i = 0; i < na; ++i) comp = oracle::direct_convolve(comp, a);
            for (std::uint64_t i = 0; i < nb; ++i) comp = oracle::direct_convolve(comp, b);
            double mean = 0.0, second = 0.0;
            for (std::size_t n = 0; n < comp.size(); ++n) {
                mean += n * comp[n];
                second += double(n) * n * comp[n];
            }
            const double var = second - mean * mean;
            const auto g = typeclass_gaussian(target, {na, nb}, na + nb);
            EXPECT_NEAR(g.sigma * g.sigma * (na + nb), var, 1e-9 * var);
            EXPECT_NEAR(g.mu * (na + nb), mean, 1e-12 * mean);
        }
    }
}

TEST(LowerBound, ReferenceValues) {
    const auto d = typical_decomposition(two_fair(), 4, 0.5);
    EXPECT_NEAR(fidelity_lower_bound(d, two_fair(), 0.0), 0.875 * 0.875, 1e-15);
    EXPECT_NEAR(fidelity_mixed_lower_bound(two_fair(), 4, 0.1, 0.5), 0.875 * 0.875 * std::exp(-0.01), 1e-15);
    EXPECT_NEAR(fidelity_mixed_lower_bound(two_fair(), 4, 0.1, 0.5), 0.758007, 5e-7);

    const auto s = state({0.1, 0.6, 0.3});
    for (double g : {0.05, 0.4}) {
        EXPECT_NEAR(fidelity_mixed_lower_bound(MixedTarget::pure(s), 30, g, 0.2),
                    u1::fidelity_pure_gauss(s.variance(), 30, g), 1e-15);
    }
}

TEST(FomBound, PureTargetNearExact) {
    const auto fair = state({0.5, 0.5});
    const double bound = figure_of_merit_mixed_bound(fair, 1600, MixedTarget::pure(fair), 40);
    EXPECT_NEAR(bound, u1::figure_of_merit_exact(fair, 1600, fair, 40), 0.02);
}

TEST(FomBound, AsymmetryFreeSourceAveragesBound) {
    const auto target = two_fair();
    MixedBoundOptions opt;
    opt.epsilon = 0.5;
    const double f = figure_of_merit_mixed_bound(state({1.0}), 20, target, 4, opt);
    const auto d = typical_decomposition(target, 4, 0.5);
    const std::size_t k = 1 << 14;
    double avg = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        avg += fidelity_lower_bound(d, target, -std::numbers::pi + 2 * std::numbers::pi * (i + 0.5) / k);
    }
    avg /= k;
    EXPECT_NEAR(f, avg, 1e-8);
    EXPECT_LT(f, 1.0);
}

TEST(FomBound, EqualVarianceComponentsLargeN) {
    const auto source = state({0.5, 0.5});
    const auto target = two_fair();
    const double bound = figure_of_merit_mixed_bound(source, 6400, target, 64);
    const double delta = typical_decomposition(target, 64, epsilon_schedule(64)).residual_mass;
    const double closed = u1::figure_of_merit_closed(0.25, 6400, 0.25, 64);
    EXPECT_GE(bound, 0.9 * (1.0 - delta) * closed);
    // Frozen from the quadrature oracle.
    EXPECT_NEAR(bound, 0.997460727908, 1e-9);
}

TEST(Uhlmann, BasicProperties) {
    std::mt19937_64 rng(31);
    Normal normal{rng};
    for (int dim : {2, 3, 5}) {
        const auto rho = DensityMatrix::make(oracle::random_density(dim, dim, normal));
        const auto sigma = DensityMatrix::make(oracle::random_density(dim, dim, normal));
        const auto thin = DensityMatrix::make(oracle::random_density(dim, 1 + dim / 2, normal));
        EXPECT_NEAR(uhlmann_fidelity(rho, rho), 1.0, 1e-12);
        EXPECT_NEAR(uhlmann_fidelity(rho, thin), uhlmann_fidelity(thin, rho), 1e-12);
        EXPECT_NEAR(uhlmann_fidelity(rho, sigma), oracle::fidelity(rho.matrix(), sigma.matrix()), 1e-10);
        // The textbook form takes square roots of eigenvalues that are zero up
        // to round-off, so it is only good to about sqrt(eps) on rank-deficient input.
        EXPECT_NEAR(uhlmann_fidelity(rho, thin), oracle::fidelity(rho.matrix(), thin.matrix()), 1e-7);
    }
    Eigen::VectorXcd a(3), b(3);
    a << 1.0, std::complex<double>(0.0, 1.0), 0.5;
    b << 0.2, 1.0, std::complex<double>(-0.3, 0.4);
    const double overlap = std::norm(a.normalized().dot(b.normalized()));
    EXPECT_NEAR(uhlmann_fidelity(DensityMatrix::pure(a), DensityMatrix::pure(b)), overlap, 1e-12);
}

TEST(Uhlmann, Multiplicative) {
    std::mt19937_64 rng(37);
    Normal normal{rng};
    for (int trial = 0; trial < 20; ++trial) {
        const int d1 = 2 + trial % 2, d2 = 2 + (trial / 2) % 2;
        const auto r1 = DensityMatrix::make(oracle::random_density(d1, 1 + trial % d1, normal));
        const auto s1 = DensityMatrix::make(oracle::random_density(d1, d1, normal));
        const auto r2 = DensityMatrix::make(oracle::random_density(d2, d2, normal));
        const auto s2 = DensityMatrix::make(oracle::random_density(d2, 1, normal));
        EXPECT_NEAR(uhlmann_fidelity(tensor(r1, r2), tensor(s1, s2)),
                    uhlmann_fidelity(r1, s1) * uhlmann_fidelity(r2, s2), 1e-10);
    }
}

TEST(Uhlmann, Errors) {
    const auto a = DensityMatrix::make(Eigen::MatrixXcd::Identity(2, 2) / 2.0);
    const auto b = DensityMatrix::make(Eigen::MatrixXcd::Identity(3, 3) / 3.0);
    EXPECT_EQ(code_of([&] { uhlmann_fidelity(a, b); }), ErrorCode::dimension_mismatch);
    Eigen::MatrixXcd bad(2, 2);
    bad << 1.2, 0.0, 0.0, -0.2;
    EXPECT_EQ(code_of([&] { DensityMatrix::make(bad); }), ErrorCode::not_psd);
    Eigen::MatrixXcd unnormalized = Eigen::MatrixXcd::Identity(2, 2);
    EXPECT_EQ(code_of([&] { DensityMatrix::make(unnormalized); }), ErrorCode::invalid_argument);
}

TEST(Uhlmann, RootFidelityJointlyConcave) {
    std::mt19937_64 rng(41);
    Normal normal{rng};
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 2 + trial % 5;
        const int parts = 2 + trial % 3;
        std::vector<double> r(parts);
        double s = 0.0;
        for (auto &x : r) s += (x = u(rng));
        Eigen::MatrixXcd mix_a = Eigen::MatrixXcd::Zero(dim, dim), mix_b = mix_a;
        double rhs = 0.0;
        for (int j = 0; j < parts; ++j) {
            r[j] /= s;
            const auto a = DensityMatrix::make(oracle::random_density(dim, 1 + (trial + j) % dim, normal));
            const auto b = DensityMatrix::make(oracle::random_density(dim, 1 + (trial + 2 * j) % dim, normal));
            mix_a += r[j] * a.matrix();
            mix_b += r[j] * b.matrix();
            rhs += r[j] * std::sqrt(uhlmann_fidelity(a, b));
        }
        const double lhs = std::sqrt(uhlmann_fidelity(DensityMatrix::make(mix_a), DensityMatrix::make(mix_b)));
        EXPECT_GE(lhs, rhs - 1e-10) << "trial " << trial;
    }
}

TEST(DenseOracle, ReferenceValues) {
    const auto target = MixedTarget::make({{0.6, state({0.5, 0.5})}, {0.4, state({0.2, 0.8})}});
    for (std::uint64_t m = 1; m <= 3; ++m) EXPECT_NEAR(exact_mixed_fidelity_small(target, m, 0.0), 1.0, 1e-12);
    for (double g : {0.1, 0.7, 2.0}) {
        const double f1 = exact_mixed_fidelity_small(target, 1, g);
        EXPECT_NEAR(exact_mixed_fidelity_small(target, 2, g), f1 * f1, 1e-10);
    }
    // One component with three levels and one with two: (2 + 1) * 2 = 6 > 4.
    const auto wide = MixedTarget::make({{0.5, state({0.2, 0.3, 0.5})}, {0.5, state({0.5, 0.5})}});
    EXPECT_EQ(code_of([&] { exact_mixed_fidelity_small(wide, 1, 0.3, 4); }), ErrorCode::cap_exceeded);
}

TEST(DenseOracle, PureComponentsMatchOverlap) {
    const auto s = state({0.3, 0.7});
    for (double g : {0.2, 1.1}) {
        EXPECT_NEAR(exact_mixed_fidelity_small(MixedTarget::pure(s), 3, g), u1::fidelity_pure_exact(s, 3, g), 1e-10);
    }
}

TEST(DenseOracle, LowerBoundNeverExceedsExact) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t rank = 2 + trial % 2;
        std::vector<MixedComponent> comps;
        std::vector<double> w(rank);
        double s = 0.0;
        for (auto &x : w) s += (x = u(rng));
        for (std::size_t k = 0; k < rank; ++k) {
            const double a = u(rng);
            comps.push_back({w[k] / s, state({a / (a + 1.0), 1.0 / (a + 1.0)})});
        }
        const auto target = MixedTarget::make(std::move(comps));
        const std::uint64_t m = 2 + (trial / 2) % 2;
        const double gamma = 3.0 * u(rng);
        const double exact = exact_mixed_fidelity_small(target, m, gamma);
        for (double eps : {epsilon_schedule(m), 0.5, 1.0, 2.0}) {
            const double bound =
                fidelity_lower_bound(typical_decomposition(target, m, eps), target, gamma, ClassFidelity::exact);
            EXPECT_LE(bound, exact + 1e-12) << "trial " << trial << " eps " << eps;
        }
    }
}
