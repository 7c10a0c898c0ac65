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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "phaseconv/distributions.hpp"
#include "phaseconv/mixed.hpp"
#include "phaseconv/u1.hpp"
#include "phaseconv/zd.hpp"

using namespace phaseconv;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

u1::NumberState state(std::vector<double> p, std::int64_t offset = 0) {
    return u1::standardize(IntDistribution::from_probs(offset, std::move(p)));
}

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> random_simplex(std::mt19937_64 &rng, std::size_t d, double floor = 0.0) {
    std::uniform_real_distribution<double> u(floor, 1.0);
    std::vector<double> p(d);
    double s = 0.0;
    for (auto &x : p) s += (x = u(rng));
    for (auto &x : p) x /= s;
    return p;
}

Eigen::MatrixXcd random_density(std::mt19937_64 &rng, int dim, int rank) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXcd g(dim, rank);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < rank; ++j) g(i, j) = {n(rng), n(rng)};
    }
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return (rho + rho.adjoint()) / 2.0;
}

// 1: closed-form convergence along M = sqrt(N).
Verdict closed_form_convergence() {
    const auto fair = state({0.5, 0.5});
    std::vector<double> gaps;
    double f_last = 0.0, c_last = 0.0;
    for (auto [n, m] : {std::pair{400, 20}, {1600, 40}, {6400, 80}}) {
        f_last = u1::figure_of_merit_exact(fair, n, fair, m);
        c_last = u1::figure_of_merit_closed(0.25, n, 0.25, m);
        gaps.push_back(std::abs(f_last - c_last));
    }
    const bool decreasing = gaps[0] > gaps[1] && gaps[1] > gaps[2];
    const bool in_range = f_last >= 0.97 && f_last <= 1.0;
    const bool closed_ok = std::abs(c_last - 1.0 / std::sqrt(1.0 + 80.0 / 12800.0)) < 1e-12 &&
                           std::abs(c_last - 0.99689) < 5e-6;
    return {decreasing && in_range && closed_ok,
            fmt("gaps %.3e > %.3e > %.3e; f_exact(6400,80)=%.8f, f_closed=%.8f", gaps[0], gaps[1], gaps[2], f_last,
                c_last)};
}

// 2: sublinear schedule M = ceil(N^0.8) converges.
Verdict sublinear_convergence() {
    const auto fair = state({0.5, 0.5});
    const auto report = u1::rate_analysis(fair, fair, u1::RateSchedule::power(0.8), {1000, 10000, 100000});
    const auto &r = report.rows;
    const bool increasing = r[0].f_exact < r[1].f_exact && r[1].f_exact < r[2].f_exact;
    return {increasing && r[2].f_exact >= 0.95 && r[2].m == 10000,
            fmt("M=%llu,%llu,%llu f_exact=%.6f,%.6f,%.6f (closed %.6f at N=1e5)", (unsigned long long)r[0].m,
                (unsigned long long)r[1].m, (unsigned long long)r[2].m, r[0].f_exact, r[1].f_exact, r[2].f_exact,
                r[2].f_closed)};
}

// 3: linear schedule M = N plateaus at 1/sqrt(1.5).
Verdict linear_plateau() {
    const auto fair = state({0.5, 0.5});
    const double plateau = 1.0 / std::sqrt(1.5);
    double worst = 0.0;
    std::string values;
    for (std::uint64_t n : {2000u, 4000u, 8000u}) {
        const double f = u1::figure_of_merit_exact(fair, n, fair, n);
        worst = std::max(worst, std::abs(f - plateau));
        values += fmt(" N=%llu:%.6f", (unsigned long long)n, f);
    }
    return {worst <= 0.01, fmt("plateau %.5f;%s; max deviation %.2e", plateau, values.c_str(), worst)};
}

// 4: posterior total-variation distance to the Gaussian model shrinks like 1/sqrt(N).
Verdict posterior_quality() {
    const auto fair = state({0.5, 0.5});
    std::vector<double> tv;
    for (std::uint64_t n : {64u, 256u, 1024u}) tv.push_back(u1::posterior_tv_distance(u1::PosteriorSpec::make(fair, n)));
    const double r1 = tv[0] / tv[1], r2 = tv[1] / tv[2];
    const bool decreasing = tv[0] > tv[1] && tv[1] > tv[2];
    const bool bracket = r1 >= 1.4 && r1 <= 3.0 && r2 >= 1.4 && r2 <= 3.0;
    return {decreasing && bracket,
            fmt("TV=%.4e,%.4e,%.4e ratios %.3f,%.3f (required [1.4,3.0]; symmetric spectrum decays as 1/N)", tv[0],
                tv[1], tv[2], r1, r2)};
}

// 5: geometric Z_d convergence and the exact eta_0 case.
Verdict zd_geometric() {
    const std::vector<double> p = {0.9, 0.1};
    std::vector<std::uint64_t> ns;
    for (std::uint64_t n = 4; n <= 24; ++n) ns.push_back(n);
    const auto fit = zd::fit_failure_rate(p, 2, ns);
    const double predicted = 2.0 * std::log(0.8);
    const double rel = std::abs(fit.slope / predicted - 1.0);
    bool certain = true;
    for (std::size_t d = 2; d <= 7; ++d) {
        for (std::int64_t m = 0; m < static_cast<std::int64_t>(d); ++m) {
            certain = certain && std::abs(zd::outcome_distribution(zd::CyclicState::eta(d, m), 0)[m] - 1.0) <= 1e-14;
        }
        certain = certain && zd::success_probability(std::vector<double>(d, 1.0 / d), 5, d) == 1.0;
    }
    return {rel <= 0.05 && certain,
            fmt("slope %.5f vs 2 ln 0.8 = %.5f (%.2f%%); eta_0 outcome certain: %s", fit.slope, predicted, 100 * rel,
                certain ? "yes" : "no")};
}

// 6: canonical coefficients equal brute-force enumeration.
Verdict canonical_equivalence() {
    std::mt19937_64 rng(6);
    double worst = 0.0;
    int cases = 0;
    for (std::size_t d = 2; d <= 5; ++d) {
        for (std::uint64_t n = 1; n <= 8; ++n) {
            for (int trial = 0; trial < 50; ++trial) {
                const auto p = random_simplex(rng, d);
                const auto a = zd::canonical_coeffs(p, n).c;
                const auto b = zd::brute_force_coeffs(p, n);
                for (std::size_t j = 0; j < d; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
                ++cases;
            }
        }
    }
    return {worst <= 1e-12, fmt("%d cases, max |difference| %.2e", cases, worst)};
}

// 7: typical-set residual mass.
Verdict typical_set() {
    const auto fair = state({0.5, 0.5});
    const auto target = mixed::MixedTarget::make({{0.5, fair}, {0.5, state({0.5, 0.5}, 1)}});
    const double delta = mixed::typical_decomposition(target, 4, 0.5).residual_mass;
    std::vector<double> schedule;
    for (std::uint64_t m : {16u, 64u, 256u, 1024u}) {
        schedule.push_back(mixed::typical_decomposition(target, m, mixed::epsilon_schedule(m)).residual_mass);
    }
    const bool decreasing = schedule[0] > schedule[1] && schedule[1] > schedule[2] && schedule[2] > schedule[3];
    return {delta == 0.125 && decreasing,
            fmt("delta(M=4, eps=0.5)=%.17g; schedule deltas %.3e,%.3e,%.3e,%.3e", delta, schedule[0], schedule[1],
                schedule[2], schedule[3])};
}

// 8: fidelity oracles and the certified lower bound.
Verdict fidelity_oracles() {
    std::mt19937_64 rng(8);
    double mult_err = 0.0;
    int concave_fail = 0, squared_concave_fail = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int d1 = 2 + trial % 2, d2 = 2 + (trial / 2) % 2;
        const auto r1 = mixed::DensityMatrix::make(random_density(rng, d1, 1 + trial % d1));
        const auto s1 = mixed::DensityMatrix::make(random_density(rng, d1, d1));
        const auto r2 = mixed::DensityMatrix::make(random_density(rng, d2, 1 + trial % d2));
        const auto s2 = mixed::DensityMatrix::make(random_density(rng, d2, d2));
        mult_err = std::max(mult_err, std::abs(mixed::uhlmann_fidelity(mixed::tensor(r1, r2), mixed::tensor(s1, s2)) -
                                               mixed::uhlmann_fidelity(r1, s1) * mixed::uhlmann_fidelity(r2, s2)));

        const int dim = 2 + trial % 5;
        const int parts = 2 + trial % 3;
        const auto w = random_simplex(rng, parts, 0.05);
        Eigen::MatrixXcd ma = Eigen::MatrixXcd::Zero(dim, dim), mb = ma;
        double root_avg = 0.0, avg = 0.0;
        for (int j = 0; j < parts; ++j) {
            const auto a = mixed::DensityMatrix::make(random_density(rng, dim, 1 + (trial + j) % dim));
            const auto b = mixed::DensityMatrix::make(random_density(rng, dim, 1 + (trial + 2 * j) % dim));
            ma += w[j] * a.matrix();
            mb += w[j] * b.matrix();
            const double f = mixed::uhlmann_fidelity(a, b);
            root_avg += w[j] * std::sqrt(f);
            avg += w[j] * f;
        }
        const double f_mix = mixed::uhlmann_fidelity(mixed::DensityMatrix::make(ma), mixed::DensityMatrix::make(mb));
        if (std::sqrt(f_mix) < root_avg - 1e-12) ++concave_fail;
        if (f_mix < avg - 1e-12) ++squared_concave_fail;
    }

    int bound_fail = 0, bound_cases = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t rank = 2 + trial % 2;
        const auto t = random_simplex(rng, rank, 0.05);
        std::vector<mixed::MixedComponent> comps;
        for (std::size_t k = 0; k < rank; ++k) comps.push_back({t[k], state(random_simplex(rng, 2, 0.05))});
        const auto target = mixed::MixedTarget::make(std::move(comps));
        const std::uint64_t m = 2 + trial % 2;
        const double gamma = std::uniform_real_distribution<double>(0.01, 3.0)(rng);
        const double exact = mixed::exact_mixed_fidelity_small(target, m, gamma);
        for (double eps : {mixed::epsilon_schedule(m), 0.5, 2.0}) {
            const auto dec = mixed::typical_decomposition(target, m, eps);
            if (mixed::fidelity_lower_bound(dec, target, gamma, mixed::ClassFidelity::exact) > exact + 1e-12) {
                ++bound_fail;
            }
            ++bound_cases;
        }
    }
    return {mult_err <= 1e-10 && concave_fail == 0 && bound_fail == 0,
            fmt("multiplicativity err %.2e; root-fidelity concavity violations %d/100 (squared form: %d/100); "
                "bound > exact in %d/%d",
                mult_err, concave_fail, squared_concave_fail, bound_fail, bound_cases)};
}

// 9: Monte Carlo and quadrature agree with the Fourier inner product.
Verdict cross_method() {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> width(2, 4);
    std::uniform_int_distribution<std::uint64_t> ncopies(20, 2000), mcopies(1, 60);
    int outside = 0;
    double worst_z = 0.0, worst_quad = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto src = state(random_simplex(rng, width(rng), 0.05));
        const auto tgt = state(random_simplex(rng, width(rng), 0.05));
        const auto n = ncopies(rng), m = mcopies(rng);
        const double exact = u1::figure_of_merit_exact(src, n, tgt, m);
        const auto mc = u1::figure_of_merit_mc(src, n, tgt, m, 20000, 1000 + trial);
        const double z = std::abs(mc.estimate - exact) / mc.stderr_;
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ++outside;
        worst_quad = std::max(worst_quad, std::abs(u1::figure_of_merit_quadrature(src, n, tgt, m) - exact));
    }
    return {outside == 0 && worst_quad <= 1e-8,
            fmt("MC outside 3 stderr: %d/20 (max z %.2f); max |quadrature - inner product| %.2e", outside, worst_z,
                worst_quad)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char *name;
        double budget_s;
        std::function<Verdict()> check;
    };
    const std::vector<Criterion> criteria = {
        {1, "closed-form convergence", 60.0, closed_form_convergence},
        {2, "sublinear-rate convergence", 300.0, sublinear_convergence},
        {3, "linear-rate plateau", 0.0, linear_plateau},
        {4, "posterior model quality", 0.0, posterior_quality},
        {5, "Z_d geometric convergence", 1.0, zd_geometric},
        {6, "canonical-coefficient oracle", 0.0, canonical_equivalence},
        {7, "typical-set machinery", 0.0, typical_set},
        {8, "mixed-state fidelity oracles", 0.0, fidelity_oracles},
        {9, "cross-method consistency", 0.0, cross_method},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception &e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) {
            v.pass = false;
            v.detail += fmt("; over the %.0f s budget", c.budget_s);
        }
        std::printf("criterion %d %s  %s: %s [%.2f s]\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
