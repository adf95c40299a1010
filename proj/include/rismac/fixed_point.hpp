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

#ifndef rismac_fixed_point_H
#define rismac_fixed_point_H

#include <vector>

#include <armadillo>

#include "rismac/channel.hpp"
#include "rismac/correlation.hpp"
#include "rismac/scenario.hpp"

namespace rismac
{
    // Scalar parameters of the saddle point. Direct-link SNR ratios enter every
    // deterministic-equivalent formula as sqrt(gamma_m) on each of R_dm and T_dm
    // (the symmetric gauge), so all d-parameters vanish identically at gamma = 0.
    // TXs outside the active subset keep all their parameters at 0.
    struct FixedPointState
    {
        arma::vec t_d, r_d; // [M]
        arma::vec t_1;      // [K]
        arma::mat r_1, t_2, r_2; // K x M

        arma::uword iterations = 0;
        double residual = 0.0;

        static FixedPointState zeros(arma::uword M, arma::uword K)
        {
            FixedPointState s;
            s.t_d.zeros(M);
            s.r_d.zeros(M);
            s.t_1.zeros(K);
            s.r_1.zeros(K, M);
            s.t_2.zeros(K, M);
            s.r_2.zeros(K, M);
            return s;
        }
    };

    // Eigenvalues of Sigma_km = S_tkm^{1/2} Phi_k^dagger S_rk Phi_k S_tkm^{1/2}
    // for every (k,m); the solver, the mean, and the variance touch Sigma only
    // through spectral sums, so Ns x Ns algebra happens once per phase config.
    using SigmaSpectra = std::vector<arma::vec>; // [K*M], nonzero eigenvalues, descending

    SigmaSpectra sigma_spectra(const CorrelationSet &correlations, const PhaseConfig &phases);

    // Dense Sigma_km for inspection and tests.
    arma::cx_mat assemble_sigma(const CorrelationSet &correlations, const PhaseConfig &phases,
                                arma::uword k, arma::uword m);

    struct EffectiveMatrices
    {
        arma::cx_mat R_tilde;              // Nr x Nr
        std::vector<arma::cx_mat> T_tilde; // [M] Nt x Nt
        std::vector<arma::cx_mat> Sigma;   // [K*M] Ns x Ns
    };

    EffectiveMatrices effective_matrices(const CorrelationSet &correlations,
                                         const PhaseConfig &phases, const FixedPointState &state,
                                         const Subset &subset);

    // Damped Picard solution of the six coupled trace equations. Throws
    // convergence_error if the equation residual stays above the tolerance.
    FixedPointState solve_fixed_point(const CorrelationSet &correlations,
                                      const PhaseConfig &phases,
                                      const std::vector<arma::cx_mat> &Q, const Subset &subset,
                                      const FixedPointSettings &settings = {});

    FixedPointState solve_fixed_point(const CorrelationSet &correlations,
                                      const SigmaSpectra &spectra,
                                      const std::vector<arma::cx_mat> &Q, const Subset &subset,
                                      const FixedPointSettings &settings = {});

    // Asymptotic ergodic sum-MI normalized per TX antenna, evaluated at the
    // given parameter state (stationary in the state at the solved point).
    double ergodic_mi(const CorrelationSet &correlations, const PhaseConfig &phases,
                      const std::vector<arma::cx_mat> &Q, const Subset &subset,
                      const FixedPointState &state);

    double ergodic_mi(const CorrelationSet &correlations, const SigmaSpectra &spectra,
                      const std::vector<arma::cx_mat> &Q, const Subset &subset,
                      const FixedPointState &state);

    // Max relative mismatch of the six equation families at the given state.
    double equation_residual(const CorrelationSet &correlations, const SigmaSpectra &spectra,
                             const std::vector<arma::cx_mat> &Q, const Subset &subset,
                             const FixedPointState &state);

    // One parameter sweep in the solver's stage order; damping 1.0 reproduces
    // the direct updates of the joint phase-optimization loop.
    void fixed_point_sweep(const CorrelationSet &correlations, const SigmaSpectra &spectra,
                           const std::vector<arma::cx_mat> &Q, const Subset &subset,
                           FixedPointState &state, double damping = 1.0);

    // T_tilde_m at the given state (waterfilling operates on its eigenvalues).
    arma::cx_mat t_tilde_matrix(const CorrelationSet &correlations, const FixedPointState &state,
                                arma::uword m);

} // namespace rismac

#endif
