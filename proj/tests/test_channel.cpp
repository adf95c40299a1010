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

#include "rismac/channel.hpp"

using namespace rismac;

TEST_CASE("zero direct SNR gives an exactly zero direct matrix")
{
    const CorrelationSet set = identity_correlation_set(2, 1, 3, 2, 4, 1.0, /*gamma=*/0.0);
    const ChannelRealization r = sample_channels(set, 99);
    CHECK(arma::norm(r.G_d[0], "fro") == 0.0);
    CHECK(arma::norm(r.G_d[1], "fro") == 0.0);
    CHECK(arma::norm(r.G_r[0], "fro") > 0.0);
}

TEST_CASE("identical seeds give bit-identical realizations")
{
    const CorrelationSet set = identity_correlation_set(1, 1, 3, 2, 4, 1.0, 0.5);
    const ChannelRealization a = sample_channels(set, 1234);
    const ChannelRealization b = sample_channels(set, 1234);
    const ChannelRealization c = sample_channels(set, 1235);
    CHECK(arma::abs(a.G_t[0] - b.G_t[0]).max() == 0.0);
    CHECK(arma::abs(a.G_d[0] - b.G_d[0]).max() == 0.0);
    CHECK(arma::abs(a.G_r[0] - c.G_r[0]).max() > 0.0);
}

TEST_CASE("empirical entry covariance matches the Kronecker model")
{
    // complex-valued R and T so the transpose convention is exercised
    CorrelationSet set = identity_correlation_set(1, 0, 2, 2, 1, 1.0, 1.0);
    set.R_d[0] = {{1.0, std::complex<double>(0.5, 0.3)},
                  {std::complex<double>(0.5, -0.3), 1.0}};
    set.T_d[0] = {{1.0, std::complex<double>(0.0, -0.4)},
                  {std::complex<double>(0.0, 0.4), 1.0}};
    set.finalize();

    const arma::uword n_draws = 200000;
    arma::cx_mat acc_r(2, 2, arma::fill::zeros); // E[G_{i0} G*_{j0}] over i,j
    arma::cx_mat acc_t(2, 2, arma::fill::zeros); // E[G_{0l} G*_{0n}] over l,n
    std::complex<double> acc_mixed(0.0, 0.0);    // E[G_{00} G*_{11}]
    for (arma::uword d = 0; d < n_draws; ++d)
    {
        const ChannelRealization r = sample_channels(set, draw_seed(5150, d));
        const arma::cx_mat &G = r.G_d[0];
        const arma::cx_vec row0 = G.row(0).st();
        acc_r += G.col(0) * G.col(0).t();
        acc_t += row0 * row0.t();
        acc_mixed += G(0, 0) * std::conj(G(1, 1));
    }
    acc_r /= n_draws;
    acc_t /= n_draws;
    acc_mixed /= n_draws;

    // cov(G_{i0}, G_{j0}) = (gamma/Nt) R_ij T_00 = 0.5 R_ij, se ~ 0.5/sqrt(n)
    const double se = 3.0 * 0.5 / std::sqrt(static_cast<double>(n_draws));
    CHECK(std::abs(acc_r(0, 0) - 0.5) < se);
    CHECK(std::abs(acc_r(0, 1) - 0.5 * set.R_d[0](0, 1)) < se);
    // cov(G_{0l}, G_{0n}) = 0.5 T_ln, including the imaginary sign
    CHECK(std::abs(acc_t(0, 1) - 0.5 * set.T_d[0](0, 1)) < se);
    // cov(G_{00}, G_{11}) = 0.5 R_01 T_01
    CHECK(std::abs(acc_mixed - 0.5 * set.R_d[0](0, 1) * set.T_d[0](0, 1)) < se);
}

TEST_CASE("total channel composes the reflections")
{
    const CorrelationSet set = identity_correlation_set(1, 2, 2, 2, 3, 1.0, 1.0);
    const ChannelRealization r = sample_channels(set, 42);

    SUBCASE("no RIS contribution leaves the direct matrix")
    {
        ChannelRealization damped = r;
        damped.G_r[0].zeros();
        damped.G_r[1].zeros();
        PhaseConfig phases = PhaseConfig::identity(2, 3);
        phases.phases[0].fill(0.7);
        const auto G = total_channel(damped, phases);
        CHECK(arma::abs(G[0] - r.G_d[0]).max() < 1e-15);
    }

    SUBCASE("scalar case matches the closed form")
    {
        const CorrelationSet s1 = identity_correlation_set(1, 1, 1, 1, 1, 1.0, 1.0);
        const ChannelRealization one = sample_channels(s1, 3);
        PhaseConfig phases = PhaseConfig::identity(1, 1);
        phases.phases[0](0) = 1.234;
        const auto G = total_channel(one, phases);
        const std::complex<double> expected =
            one.G_d[0](0, 0) + one.G_r[0](0, 0) * std::polar(1.0, 1.234) * one.G_t[0](0, 0);
        CHECK(std::abs(G[0](0, 0) - expected) < 1e-15);
    }
}

TEST_CASE("instantaneous MI basics")
{
    const arma::uword Nt = 3, Nr = 2;
    std::vector<arma::cx_mat> Q = uniform_covariance(2, Nt, 2.0);
    std::vector<arma::cx_mat> G(2, arma::cx_mat(Nr, Nt, arma::fill::zeros));

    SUBCASE("zero channels and empty subsets give zero")
    {
        CHECK(instantaneous_mi(G, Q, {0, 1}, 2.0) == 0.0);
        G[0].fill(std::complex<double>(0.3, -0.1));
        CHECK(instantaneous_mi(G, Q, {}, 2.0) == 0.0);
    }

    SUBCASE("scalar formula: log(1 + rho |g|^2)")
    {
        const CorrelationSet s1 = identity_correlation_set(1, 0, 1, 1, 1, 10.0, 1.0);
        std::vector<arma::cx_mat> g(1);
        g[0] = arma::cx_mat(1, 1);
        g[0](0, 0) = std::complex<double>(1.0, 0.0);
        const auto Q1 = uniform_covariance(1, 1, 10.0);
        CHECK(instantaneous_mi(g, Q1, {0}, 10.0) == doctest::Approx(std::log(11.0)).epsilon(1e-12));
    }

    SUBCASE("monotone in the subset")
    {
        const CorrelationSet set = identity_correlation_set(2, 1, Nt, Nr, 4, 2.0, 1.0);
        const auto Gs = total_channel(sample_channels(set, 8), PhaseConfig::identity(1, 4));
        const double one = instantaneous_mi(Gs, Q, {0}, 2.0);
        const double both = instantaneous_mi(Gs, Q, {0, 1}, 2.0);
        CHECK(one <= both + 1e-12);
        CHECK(one >= 0.0);
    }

    SUBCASE("unitary rotation of channel and covariance is invariant")
    {
        const CorrelationSet set = identity_correlation_set(1, 0, Nt, Nr, 1, 2.0, 1.0);
        auto Gs = total_channel(sample_channels(set, 9), PhaseConfig::identity(0, 1));
        arma::cx_mat A(Nt, Nt, arma::fill::randn);
        arma::cx_mat Umat, R;
        REQUIRE(arma::qr(Umat, R, A));
        std::vector<arma::cx_mat> Qr = {arma::cx_mat(Nt, Nt, arma::fill::zeros)};
        arma::vec diag_q = {2.0 * 1.3, 2.0 * 0.9, 2.0 * 0.8}; // trace = rho Nt
        Qr[0] = arma::diagmat(arma::cx_vec(diag_q, arma::vec(Nt, arma::fill::zeros)));
        const double before = instantaneous_mi(Gs, Qr, {0}, 2.0);
        std::vector<arma::cx_mat> G2 = {Gs[0] * Umat};
        std::vector<arma::cx_mat> Q2 = {Umat.t() * Qr[0] * Umat};
        const double after = instantaneous_mi(G2, Q2, {0}, 2.0);
        CHECK(before == doctest::Approx(after).epsilon(1e-12));
    }

    SUBCASE("power constraint is enforced")
    {
        std::vector<arma::cx_mat> Qbad = uniform_covariance(2, Nt, 2.0);
        Qbad[0] *= 1.5;
        std::vector<arma::cx_mat> Gs(2, arma::cx_mat(Nr, Nt, arma::fill::ones));
        CHECK_THROWS_AS(instantaneous_mi(Gs, Qbad, {0, 1}, 2.0), config_error);
    }
}

TEST_CASE("mc statistics: determinism, zero power, subset sharing")
{
    const CorrelationSet set = identity_correlation_set(2, 1, 3, 2, 4, 2.0, 0.0);
    const PhaseConfig phases = PhaseConfig::identity(1, 4);
    const auto Q = uniform_covariance(2, 3, 2.0);

    SUBCASE("same seed, same statistics; different thread counts agree exactly")
    {
        const McStatistics a = mc_statistics(set, phases, Q, {0, 1}, 64, 7, 1);
        const McStatistics b = mc_statistics(set, phases, Q, {0, 1}, 64, 7, 4);
        CHECK(a.mean == b.mean);
        CHECK(a.variance == b.variance);
        CHECK(arma::abs(a.sorted_samples - b.sorted_samples).max() == 0.0);
        CHECK(a.variance > 0.0);
        CHECK(a.se_mean > 0.0);
    }

    SUBCASE("zero power means zero MI")
    {
        const auto Q0 = uniform_covariance(2, 3, 0.0);
        const McStatistics s = mc_statistics(set, phases, Q0, {0, 1}, 16, 3);
        CHECK(s.mean == 0.0);
        CHECK(s.variance == 0.0);
    }

    SUBCASE("nested subsets evaluated on shared draws are ordered")
    {
        const auto stats = mc_statistics_multi(set, phases, Q, {{0}, {0, 1}}, 128, 5);
        CHECK(stats[0].mean <= stats[1].mean);
    }

    SUBCASE("n_draws < 2 is rejected")
    {
        CHECK_THROWS_AS(mc_statistics(set, phases, Q, {0}, 1, 3), config_error);
    }
}
