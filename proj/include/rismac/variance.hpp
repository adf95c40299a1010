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

#ifndef rismac_variance_H
#define rismac_variance_H

#include <armadillo>

#include "rismac/fixed_point.hpp"

namespace rismac
{
    // Trace blocks of the fluctuation Hessian and the assembled (2M + 4MK)
    // matrix Lambda in the block order [dt, 1t, 2t, dr, 1r, 2r]. The MK-sized
    // blocks flatten (k, m) as k*M + m. All entries are real.
    struct LambdaBlocks
    {
        arma::uword M = 0, K = 0;
        arma::mat M_dt, M_dr;           // M x M (M_dt diagonal)
        arma::mat M_1t, M_2r, M_12;     // MK x MK diagonal
        arma::mat M_2t;                 // MK x MK, block-diagonal in m
        arma::mat M_1r;                 // MK x MK
        arma::mat M_1dr, M_2dt;         // MK x M
        arma::mat Lambda;               // (2M + 4MK) square

        arma::uword dim() const { return 2 * M + 4 * M * K; }
    };

    // Builds every block from the converged state via the barred matrices
    // Rbar = I + R_tilde, Tbar_m = I + Q_m T_tilde_m, Sbar_km = I + t_1k r_2km Sigma_km.
    LambdaBlocks assemble_lambda(const CorrelationSet &correlations, const PhaseConfig &phases,
                                 const std::vector<arma::cx_mat> &Q, const FixedPointState &state);

    LambdaBlocks assemble_lambda(const CorrelationSet &correlations, const SigmaSpectra &spectra,
                                 const std::vector<arma::cx_mat> &Q, const FixedPointState &state);

    // Var(I) = -log det Lambda in nats^2, with the replica-measure parity
    // (-1)^M factored out of the LU determinant so the argument is positive for
    // every legitimate scenario; throws numerical_error if it is not.
    double variance(const LambdaBlocks &blocks);

    // Standard normal CDF((rate - mean_total) / sqrt(variance)); mean_total is
    // the unnormalized mean Nt * C.
    double gaussian_outage(double mean_total, double variance, double rate);

} // namespace rismac

#endif
