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

#include "rismac/phases.hpp"

#include "rismac/correlation.hpp"

using namespace rismac;

namespace
{
    ScenarioConfig ris_scenario(arma::uword M, arma::uword K, arma::uword side)
    {
        ScenarioConfig c;
        c.M = M;
        c.K = K;
        c.Nt = 4;
        c.Nr = 2;
        c.Ns = side * side;
        c.ris_nx = side;
        c.ris_ny = side;
        c.ris_spacing = 0.06;
        c.wavelength = 0.12;
        c.rho_dB = 10.0;
        c.gamma_zero = true;
        c.tx_ris = {LinkSpec::Mode::computed, 5.0, 30.0, {45.0, -45.0, 0.0, 20.0}, false};
        c.ris_rx = {LinkSpec::Mode::computed, 5.0, 70.0, {0.0}, false};
        if (K == 2)
            c.ris_mirror = {false, true};
        return c;
    }

    double exact_sum_mi(const CorrelationSet &set, const PhaseConfig &phases,
                        const std::vector<arma::cx_mat> &Q, const Subset &s)
    {
        const FixedPointState st = solve_fixed_point(set, phases, Q, s);
        return static_cast<double>(set.Nt) * ergodic_mi(set, phases, Q, s, st);
    }
} // namespace

TEST_CASE("identity RIS correlations have a vanishing phase gradient")
{
    const CorrelationSet set = identity_correlation_set(2, 1, 4, 2, 8, db_to_linear(10.0), 0.0);
    const auto Q = uniform_covariance(2, 4, set.rho);
    OptimizerSettings settings;
    settings.max_iter = 200;
    const OptimizeResult res = optimize_full(set, Q, {0, 1}, settings);
    CHECK(arma::abs(res.phases.phases[0]).max() == 0.0); // never moved
    CHECK(res.objective ==
          doctest::Approx(exact_sum_mi(set, PhaseConfig::identity(1, 8), Q, {0, 1}))
              .epsilon(1e-10));
}

TEST_CASE("full optimization beats identity phases and ascends monotonically")
{
    const CorrelationSet set = build_correlation_set(ris_scenario(2, 1, 4));
    const auto Q = uniform_covariance(2, 4, set.rho);
    OptimizerSettings settings;
    settings.step_size = 0.05; // small steps for the strict monotonicity check
    settings.tolerance = 1e-7;
    settings.max_iter = 3000;
    const OptimizeResult res = optimize_full(set, Q, {0, 1}, settings);

    const double identity_mi = exact_sum_mi(set, PhaseConfig::identity(1, 16), Q, {0, 1});
    CHECK(res.objective > identity_mi + 1e-3);

    double prev = -arma::datum::inf;
    arma::uword checked = 0;
    for (const auto &row : res.trace)
        if (row.accepted && row.iteration > 3)
        {
            CHECK(row.objective >= prev - 1e-8);
            prev = row.objective;
            ++checked;
        }
    CHECK(checked > 10);
}

TEST_CASE("adding a constant to all phases of a RIS changes nothing")
{
    const CorrelationSet set = build_correlation_set(ris_scenario(2, 1, 4));
    const auto Q = uniform_covariance(2, 4, set.rho);
    OptimizerSettings settings;
    settings.tolerance = 1e-6;
    settings.max_iter = 500;
    const OptimizeResult res = optimize_full(set, Q, {0, 1}, settings);
    PhaseConfig shifted = res.phases;
    shifted.phases[0] += 2.345;
    CHECK(exact_sum_mi(set, shifted, Q, {0, 1}) ==
          doctest::Approx(res.objective).epsilon(1e-10));
}

TEST_CASE("gradient ascent reaches the exhaustive-search optimum on a tiny RIS")
{
    ScenarioConfig cfg = ris_scenario(1, 1, 2); // Ns = 4
    cfg.Nt = 2;
    cfg.Nr = 2;
    const CorrelationSet set = build_correlation_set(cfg);
    const auto Q = uniform_covariance(1, 2, set.rho);
    OptimizerSettings settings;
    settings.tolerance = 1e-9;
    settings.max_iter = 4000;
    const OptimizeResult res = optimize_full(set, Q, {0}, settings);

    // 8 phase levels per element, 8^4 configurations
    double best = 0.0;
    PhaseConfig probe = PhaseConfig::identity(1, 4);
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            for (int c = 0; c < 8; ++c)
                for (int d = 0; d < 8; ++d)
                {
                    probe.phases[0] = arma::vec{a * arma::datum::pi / 4.0,
                                                b * arma::datum::pi / 4.0,
                                                c * arma::datum::pi / 4.0,
                                                d * arma::datum::pi / 4.0};
                    best = std::max(best, exact_sum_mi(set, probe, Q, {0}));
                }
    CHECK(res.objective >= best - 0.01 * best);
    CHECK(std::abs(res.objective - best) / best < 0.01);
}

TEST_CASE("quantization projects onto the codebooks with the documented ties")
{
    PhaseConfig p = PhaseConfig::identity(1, 5);
    p.phases[0] = arma::vec{0.1, arma::datum::pi / 2.0, 3.0, -0.2, 6.0};

    const PhaseConfig one = quantize_phases(p, OptimizerSettings::Quantization::one_bit);
    CHECK(one.phases[0](0) == 0.0);
    CHECK(one.phases[0](2) == arma::datum::pi);
    CHECK(one.phases[0](3) == 0.0);
    CHECK(one.phases[0](4) == 0.0); // 6.0 rad wraps near 2 pi

    const PhaseConfig two = quantize_phases(p, OptimizerSettings::Quantization::two_bit);
    CHECK(two.phases[0](1) == doctest::Approx(arma::datum::pi / 4.0)); // equidistant tie
    const std::vector<double> codebook = {arma::datum::pi / 4.0, 3.0 * arma::datum::pi / 4.0,
                                          5.0 * arma::datum::pi / 4.0, 7.0 * arma::datum::pi / 4.0};
    for (arma::uword n = 0; n < 5; ++n)
    {
        bool in_book = false;
        for (double c : codebook)
            in_book = in_book || two.phases[0](n) == c;
        CHECK(in_book);
    }

    const PhaseConfig none = quantize_phases(p, OptimizerSettings::Quantization::none);
    CHECK(arma::abs(none.phases[0] - p.phases[0]).max() == 0.0);
}

TEST_CASE("zero and random initial phases reach the same objective")
{
    const CorrelationSet set = build_correlation_set(ris_scenario(2, 1, 4));
    const auto Q = uniform_covariance(2, 4, set.rho);
    OptimizerSettings settings;
    settings.tolerance = 1e-8;
    settings.max_iter = 3000;
    const OptimizeResult a = optimize_full(set, Q, {0, 1}, settings);

    PhaseConfig random_init = PhaseConfig::identity(1, 16);
    std::mt19937_64 gen(2026);
    for (arma::uword n = 0; n < 16; ++n)
        random_init.phases[0](n) =
            2.0 * arma::datum::pi * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    const OptimizeResult b = optimize_full(set, Q, {0, 1}, settings, {}, random_init);

    CHECK(std::abs(a.objective - b.objective) / a.objective < 5e-3);
}

TEST_CASE("semi-optimal ascent aligns the phases with the wave-vector difference")
{
    ScenarioConfig cfg = ris_scenario(1, 1, 4);
    const CorrelationSet set = build_correlation_set(cfg);
    const auto Q = uniform_covariance(1, 4, set.rho);
    const RankOneSpectra spectra = RankOneSpectra::from_scenario(cfg);

    for (const auto &u : spectra.u)
    {
        CHECK(std::abs(arma::norm(u) - 1.0) < 1e-12);
        for (arma::uword n = 0; n < u.n_elem; ++n)
            CHECK(std::abs(std::abs(u(n)) - 0.25) < 1e-12); // 1/sqrt(16)
    }

    OptimizerSettings settings;
    settings.mode = OptimizerSettings::Mode::semi;
    settings.tolerance = 1e-8;
    settings.max_iter = 4000;
    const OptimizeResult res = optimize_semi(set, Q, {0}, settings, spectra);

    // kappa = v^dagger Phi u should be driven to modulus ~1
    std::complex<double> kappa(0.0, 0.0);
    const arma::cx_vec phi = res.phases.coefficients(0);
    for (arma::uword n = 0; n < 16; ++n)
        kappa += std::conj(spectra.v[0](n)) * phi(n) * spectra.u[0](n);
    CHECK(std::abs(kappa) > 0.999);

    // phases follow Delta q . x_n up to one global constant (mod 2 pi)
    const ArrayGeometry ris = ris_geometry(cfg);
    std::complex<double> ref(0.0, 0.0);
    arma::vec dev(16);
    for (arma::uword n = 0; n < 16; ++n)
    {
        const double target = arma::dot(spectra.delta_q[0], ris.positions.col(n));
        const std::complex<double> rot = std::polar(1.0, res.phases.phases[0](n) - target);
        if (n == 0)
            ref = rot;
        dev(n) = std::abs(rot - ref);
    }
    CHECK(dev.max() < 0.1);
}

TEST_CASE("semi-optimal update is stationary when the wave vectors coincide")
{
    const arma::uword Ns = 9;
    const CorrelationSet set = identity_correlation_set(1, 1, 4, 2, Ns, db_to_linear(10.0), 0.0);
    const auto Q = uniform_covariance(1, 4, set.rho);
    RankOneSpectra spectra;
    spectra.u.assign(1, arma::cx_vec(Ns, arma::fill::value(
                                             std::complex<double>(1.0 / 3.0, 0.0))));
    spectra.v = spectra.u;
    spectra.delta_q.assign(1, arma::vec3(arma::fill::zeros));
    OptimizerSettings settings;
    settings.mode = OptimizerSettings::Mode::semi;
    settings.max_iter = 50;
    const OptimizeResult res = optimize_semi(set, Q, {0}, settings, spectra);
    CHECK(arma::abs(res.phases.phases[0]).max() < 1e-12);
}

TEST_CASE("weighted objective: degenerate priority vectors reduce to plain sums")
{
    const CorrelationSet set = build_correlation_set(ris_scenario(2, 1, 4));
    const auto Q = uniform_covariance(2, 4, set.rho);
    OptimizerSettings settings;
    settings.tolerance = 1e-7;
    settings.max_iter = 2000;

    SUBCASE("mu = (1, 0) optimizes TX 1 alone")
    {
        const OptimizeResult w = weighted_objective_phases(set, Q, arma::vec{1.0, 0.0}, settings);
        const OptimizeResult s = optimize_full(set, Q, {0}, settings);
        CHECK(std::abs(w.objective - s.objective) / s.objective < 1e-3);
    }

    SUBCASE("uniform mu optimizes the sum capacity")
    {
        const OptimizeResult w =
            weighted_objective_phases(set, Q, arma::vec{0.5, 0.5}, settings);
        const OptimizeResult s = optimize_full(set, Q, {0, 1}, settings);
        CHECK(std::abs(w.objective - s.objective) / s.objective < 1e-3);
    }

    SUBCASE("mu = (0.7, 0.3) evaluates the telescoped functional")
    {
        const OptimizeResult w =
            weighted_objective_phases(set, Q, arma::vec{0.7, 0.3}, settings);
        const double direct = 0.4 * exact_sum_mi(set, w.phases, Q, {0}) +
                              0.3 * exact_sum_mi(set, w.phases, Q, {0, 1});
        CHECK(w.objective == doctest::Approx(direct).epsilon(1e-9));
    }

    SUBCASE("invalid priority vectors are rejected")
    {
        CHECK_THROWS_AS(weighted_objective_phases(set, Q, arma::vec{0.3, 0.7}, settings),
                        config_error);
        CHECK_THROWS_AS(weighted_objective_phases(set, Q, arma::vec{0.5, -0.1}, settings),
                        config_error);
        CHECK_THROWS_AS(weighted_objective_phases(set, Q, arma::vec{0.0, 0.0}, settings),
                        config_error);
    }
}

TEST_CASE("the two RISs decouple: per-RIS re-optimization cannot move the joint optimum")
{
    const CorrelationSet set = build_correlation_set(ris_scenario(1, 2, 3));
    const auto Q = uniform_covariance(1, 4, set.rho);
    OptimizerSettings settings;
    settings.tolerance = 1e-8;
    settings.max_iter = 3000;
    const OptimizeResult joint = optimize_full(set, Q, {0}, settings);
    for (arma::uword k = 0; k < 2; ++k)
    {
        std::vector<bool> mask = {k == 0, k == 1};
        const OptimizeResult solo =
            optimize_full(set, Q, {0}, settings, {}, joint.phases, mask);
        CHECK(std::abs(solo.objective - joint.objective) / joint.objective < 1e-3);
    }
}
