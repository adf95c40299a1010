// SPDX-License-Identifier: Apache-2.0
//
// rismac: asymptotic capacity analysis for RIS-assisted MIMO multiple access
// Copyright (C) 2026 the rismac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include "rismac/fixed_point.hpp"

using namespace rismac;

namespace
{
    // Scalar reduction of the six equations for all-identity correlations with
    // dimension ratios beta_r = Nr/Nt, beta_s = Ns/Nt, solved by 1-D bisection
    // on R = sqrt(g) r_d + r_1. Independent of the matrix solver.
    struct ScalarSolution
    {
        double t_d, r_d, t_1, r_1, t_2, r_2, C;
    };

    ScalarSolution scalar_oracle(double beta_r, double beta_s, double rho, double gamma)
    {
        const double sg = std::sqrt(gamma);
        auto eval = [&](double R, ScalarSolution &s) {
            s.t_d = sg * beta_r / (1.0 + R);
            s.t_1 = beta_r / (1.0 + R);
            // r_2 solves r_2 (1 + rho T(r_2)) = rho with
            // T = sg t_d + t_1 beta_s / (1 + t_1 r_2): quadratic coefficients
            const double a = s.t_1 * (1.0 + rho * sg * s.t_d);
            const double b = 1.0 + rho * sg * s.t_d + rho * s.t_1 * (beta_s - 1.0);
            s.r_2 = a > 0.0 ? (-b + std::sqrt(b * b + 4.0 * a * rho)) / (2.0 * a) : rho / b;
            const double T = sg * s.t_d + s.t_1 * beta_s / (1.0 + s.t_1 * s.r_2);
            s.r_d = sg * rho / (1.0 + rho * T);
            s.r_1 = beta_s * s.r_2 / (1.0 + s.t_1 * s.r_2);
            s.t_2 = beta_s * s.t_1 / (1.0 + s.t_1 * s.r_2);
            return sg * s.r_d + s.r_1 - R; // residual of the receive-side sum
        };
        double lo = 0.0, hi = sg * rho + beta_s * rho + 1.0;
        ScalarSolution s{};
        for (int it = 0; it < 200; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (eval(mid, s) > 0.0 ? lo : hi) = mid;
        }
        const double R = 0.5 * (lo + hi);
        eval(R, s);
        const double T = sg * s.t_d + s.t_2;
        const double y = s.t_1 * s.r_2;
        s.C = beta_r * std::log1p(R) + beta_s * std::log1p(y) + std::log1p(rho * T) -
              (s.r_d * s.t_d + s.r_1 * s.t_1 + s.r_2 * s.t_2);
        return s;
    }

    // Dense Hermitian square root, used only by tests.
    arma::cx_mat test_sqrtm(const arma::cx_mat &A)
    {
        arma::vec ev;
        arma::cx_mat V;
        REQUIRE(arma::eig_sym(ev, V, A));
        ev.transform([](double x) { return std::sqrt(std::max(x, 0.0)); });
        return V * arma::diagmat(arma::cx_vec(ev, arma::vec(ev.n_elem, arma::fill::zeros))) * V.t();
    }

    CorrelationSet computed_scenario_set()
    {
        ScenarioConfig c;
        c.M = 2;
        c.K = 1;
        c.Nt = 4;
        c.Nr = 2;
        c.Ns = 16;
        c.ris_nx = 4;
        c.ris_ny = 4;
        c.tx_ris = {LinkSpec::Mode::computed, 5.0, 30.0, {45.0, -45.0}, false};
        c.ris_rx = {LinkSpec::Mode::computed, 5.0, 70.0, {0.0}, false};
        return build_correlation_set(c);
    }
} // namespace

TEST_CASE("zero power zeroes the receive-side parameters and the MI")
{
    const CorrelationSet set = identity_correlation_set(2, 1, 4, 2, 8, 1.0, 0.0);
    const auto Q = uniform_covariance(2, 4, 0.0);
    const PhaseConfig phases = PhaseConfig::identity(1, 8);
    const FixedPointState st = solve_fixed_point(set, phases, Q, {0, 1});
    CHECK(arma::abs(st.r_d).max() == 0.0);
    CHECK(arma::abs(st.r_2).max() < 1e-12);
    CHECK(arma::abs(st.r_1).max() < 1e-12);
    CHECK(ergodic_mi(set, phases, Q, {0, 1}, st) == 0.0);
}

TEST_CASE("no channel at all: gamma = 0 and K = 0 leaves every parameter zero")
{
    const CorrelationSet set = identity_correlation_set(2, 0, 4, 2, 1, 1.0, 0.0);
    const auto Q = uniform_covariance(2, 4, 1.0);
    const PhaseConfig phases = PhaseConfig::identity(0, 1);
    const FixedPointState st = solve_fixed_point(set, phases, Q, {0, 1});
    CHECK(arma::abs(st.t_d).max() == 0.0);
    CHECK(arma::abs(st.r_d).max() == 0.0);
    CHECK(ergodic_mi(set, phases, Q, {0, 1}, st) == 0.0);
}

TEST_CASE("identity-correlation fixed point matches the scalar bisection oracle")
{
    const arma::uword Nt = 2, Nr = 2, Ns = 4;
    const double rho = 10.0;
    for (double gamma : {0.0, 1.0})
    {
        CAPTURE(gamma);
        const CorrelationSet set = identity_correlation_set(1, 1, Nt, Nr, Ns, rho, gamma);
        const auto Q = uniform_covariance(1, Nt, rho);
        const PhaseConfig phases = PhaseConfig::identity(1, Ns);
        const FixedPointState st = solve_fixed_point(set, phases, Q, {0});
        const ScalarSolution s = scalar_oracle(static_cast<double>(Nr) / Nt,
                                               static_cast<double>(Ns) / Nt, rho, gamma);
        CHECK(std::abs(st.t_1(0) - s.t_1) < 1e-8);
        CHECK(std::abs(st.r_2(0, 0) - s.r_2) < 1e-8);
        CHECK(std::abs(st.r_1(0, 0) - s.r_1) < 1e-8);
        CHECK(std::abs(st.t_2(0, 0) - s.t_2) < 1e-8);
        CHECK(std::abs(st.t_d(0) - s.t_d) < 1e-8);
        CHECK(std::abs(st.r_d(0) - s.r_d) < 1e-8);
        const double C = ergodic_mi(set, phases, Q, {0}, st);
        CHECK(std::abs(C - s.C) < 1e-8);
    }
}

TEST_CASE("saddle point: first-order variation of the MI vanishes at the solution")
{
    const CorrelationSet set = computed_scenario_set();
    const auto Q = uniform_covariance(2, 4, set.rho);
    const PhaseConfig phases = PhaseConfig::identity(1, 16);
    const Subset everyone = {0, 1};
    FixedPointSettings fp;
    fp.tolerance = 1e-13;
    const FixedPointState st = solve_fixed_point(set, phases, Q, everyone, fp);
    const double C0 = ergodic_mi(set, phases, Q, everyone, st);

    auto perturbed = [&](auto &&field_setter) {
        FixedPointState p = st;
        field_setter(p);
        return ergodic_mi(set, phases, Q, everyone, p);
    };
    const double d = 1e-6;
    CHECK(std::abs(perturbed([&](FixedPointState &p) { p.t_1(0) += d; }) - C0) < 1e-9);
    CHECK(std::abs(perturbed([&](FixedPointState &p) { p.t_1(0) -= d; }) - C0) < 1e-9);
    CHECK(std::abs(perturbed([&](FixedPointState &p) { p.r_2(0, 1) += d; }) - C0) < 1e-9);
    CHECK(std::abs(perturbed([&](FixedPointState &p) { p.r_1(0, 0) -= d; }) - C0) < 1e-9);
    CHECK(std::abs(perturbed([&](FixedPointState &p) { p.t_2(0, 1) += d; }) - C0) < 1e-9);
}

TEST_CASE("subset growth cannot decrease the asymptotic MI")
{
    const CorrelationSet set = computed_scenario_set();
    const auto Q = uniform_covariance(2, 4, set.rho);
    const PhaseConfig phases = PhaseConfig::identity(1, 16);
    const double c1 = ergodic_mi(set, phases, Q, {0}, solve_fixed_point(set, phases, Q, {0}));
    const double c12 =
        ergodic_mi(set, phases, Q, {0, 1}, solve_fixed_point(set, phases, Q, {0, 1}));
    CHECK(c1 <= c12 + 1e-12);
    CHECK(c1 > 0.0);
}

TEST_CASE("solutions are independent of the initialization")
{
    const CorrelationSet set = computed_scenario_set();
    const auto Q = uniform_covariance(2, 4, set.rho);
    const PhaseConfig phases = PhaseConfig::identity(1, 16);
    FixedPointSettings a, b;
    a.init = FixedPointSettings::Init::zeros_forward;
    b.init = FixedPointSettings::Init::ones;
    a.tolerance = b.tolerance = 1e-12;
    const FixedPointState sa = solve_fixed_point(set, phases, Q, {0, 1}, a);
    const FixedPointState sb = solve_fixed_point(set, phases, Q, {0, 1}, b);
    CHECK(std::abs(sa.t_1(0) - sb.t_1(0)) < 1e-8);
    CHECK(arma::abs(sa.r_2 - sb.r_2).max() < 1e-8);
    CHECK(arma::abs(sa.r_1 - sb.r_1).max() < 1e-8);
    CHECK(arma::abs(sa.t_2 - sb.t_2).max() < 1e-8);
}

TEST_CASE("global phase rotation of one RIS changes nothing")
{
    const CorrelationSet set = computed_scenario_set();
    const auto Q = uniform_covariance(2, 4, set.rho);
    PhaseConfig phases = PhaseConfig::identity(1, 16);
    for (arma::uword n = 0; n < 16; ++n)
        phases.phases[0](n) = 0.1 * static_cast<double>(n);
    PhaseConfig shifted = phases;
    shifted.phases[0] += 0.813;

    const SigmaSpectra sa = sigma_spectra(set, phases);
    const SigmaSpectra sb = sigma_spectra(set, shifted);
    for (std::size_t i = 0; i < sa.size(); ++i)
        CHECK(arma::abs(sa[i] - sb[i]).max() < 1e-10 * std::max(1.0, sa[i].max()));

    const FixedPointState st = solve_fixed_point(set, phases, Q, {0, 1});
    const FixedPointState st2 = solve_fixed_point(set, shifted, Q, {0, 1});
    CHECK(std::abs(ergodic_mi(set, phases, Q, {0, 1}, st) -
                   ergodic_mi(set, shifted, Q, {0, 1}, st2)) < 1e-10);
}

TEST_CASE("assemble_sigma: unit-modulus diagonal cancels identity correlations")
{
    const CorrelationSet set = identity_correlation_set(1, 1, 2, 2, 6, 1.0, 0.0);
    PhaseConfig phases = PhaseConfig::identity(1, 6);
    phases.phases[0].randu();
    const arma::cx_mat Sigma = assemble_sigma(set, phases, 0, 0);
    CHECK(arma::norm(Sigma - arma::cx_mat(6, 6, arma::fill::eye), "fro") < 1e-12);
}

TEST_CASE("assemble_sigma: rank-one spectra give the |kappa|^2 projector")
{
    const arma::uword Ns = 8;
    CorrelationSet set = identity_correlation_set(1, 1, 2, 2, Ns, 1.0, 0.0);
    arma::cx_vec u(Ns), v(Ns);
    for (arma::uword n = 0; n < Ns; ++n)
    {
        u(n) = std::polar(1.0 / std::sqrt(double(Ns)), 0.7 * n);
        v(n) = std::polar(1.0 / std::sqrt(double(Ns)), -0.3 * n + 0.2);
    }
    set.S_t[0] = double(Ns) * (u * u.t());
    set.S_r[0] = double(Ns) * (v * v.t());
    set.finalize();

    PhaseConfig phases = PhaseConfig::identity(1, Ns);
    for (arma::uword n = 0; n < Ns; ++n)
        phases.phases[0](n) = 0.05 * n * n;
    const arma::cx_vec phi = phases.coefficients(0);
    std::complex<double> kappa(0.0, 0.0);
    for (arma::uword n = 0; n < Ns; ++n)
        kappa += std::conj(v(n)) * phi(n) * u(n);

    const arma::cx_mat Sigma = assemble_sigma(set, phases, 0, 0);
    const arma::cx_mat expected =
        double(Ns) * double(Ns) * std::norm(kappa) * (u * u.t());
    CHECK(arma::norm(Sigma - expected, "fro") < 1e-9 * arma::norm(expected, "fro"));
}

TEST_CASE("assemble_sigma matches an independent dense evaluation on random input")
{
    const arma::uword Ns = 4;
    CorrelationSet set = identity_correlation_set(1, 1, 2, 2, Ns, 1.0, 0.0);
    arma::arma_rng::set_seed(321);
    arma::cx_mat A(Ns, Ns, arma::fill::randn), B(Ns, Ns, arma::fill::randn);
    arma::cx_mat St = A * A.t(), Sr = B * B.t();
    St *= double(Ns) / arma::trace(St).real();
    Sr *= double(Ns) / arma::trace(Sr).real();
    set.S_t[0] = St;
    set.S_r[0] = Sr;
    set.finalize();

    PhaseConfig phases = PhaseConfig::identity(1, Ns);
    phases.phases[0] = arma::vec{0.3, -1.2, 2.5, 0.9};
    const arma::cx_vec phi = phases.coefficients(0);

    // independent route: explicit square root and dense triple product
    const arma::cx_mat sq = test_sqrtm(set.S_t[0]);
    const arma::cx_mat Phi = arma::diagmat(phi);
    const arma::cx_mat expected = sq * Phi.t() * set.S_r[0] * Phi * sq;

    const arma::cx_mat Sigma = assemble_sigma(set, phases, 0, 0);
    CHECK(arma::norm(Sigma - expected, "fro") < 1e-10 * arma::norm(expected, "fro"));

    // fast spectral path agrees with the dense eigenvalues
    arma::vec dense_ev;
    REQUIRE(arma::eig_sym(dense_ev, expected));
    dense_ev = arma::sort(dense_ev, "descend");
    const arma::vec fast = sigma_spectra(set, phases)[0];
    for (arma::uword i = 0; i < fast.n_elem; ++i)
        CHECK(std::abs(fast(i) - dense_ev(i)) < 1e-9 * std::max(1.0, dense_ev(0)));
}

TEST_CASE("effective matrices are consistent with the state")
{
    const CorrelationSet set = computed_scenario_set();
    const auto Q = uniform_covariance(2, 4, set.rho);
    const PhaseConfig phases = PhaseConfig::identity(1, 16);
    const FixedPointState st = solve_fixed_point(set, phases, Q, {0, 1});
    const EffectiveMatrices em = effective_matrices(set, phases, st, {0, 1});
    // gamma = 0: R_tilde only carries the r_1 R_k terms
    const arma::cx_mat expected =
        (st.r_1(0, 0) + st.r_1(0, 1)) * arma::cx_mat(2, 2, arma::fill::eye);
    CHECK(arma::norm(em.R_tilde - expected, "fro") < 1e-12);
    CHECK(em.T_tilde[0].n_rows == 4);
    CHECK(em.Sigma[0].n_rows == 16);
}

TEST_CASE("non-convergence raises with the residual attached")
{
    const CorrelationSet set = identity_correlation_set(1, 1, 2, 2, 4, 10.0, 0.0);
    const auto Q = uniform_covariance(1, 2, 10.0);
    FixedPointSettings fp;
    fp.max_iter = 1;
    try
    {
        solve_fixed_point(set, PhaseConfig::identity(1, 4), Q, {0}, fp);
        FAIL("expected convergence_error");
    }
    catch (const convergence_error &e)
    {
        CHECK(e.residual > 0.0);
    }
}
