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

#ifndef rismac_waterfill_H
#define rismac_waterfill_H

#include <armadillo>

#include "rismac/fixed_point.hpp"

namespace rismac
{
    struct WaterfillSolution
    {
        arma::vec powers;       // q_a = [1/lambda - 1/tau_a]_+ in the order of tau
        double water_level = 0; // lambda
        double objective = 0;   // sum_a [log(tau_a / lambda)]_+
        arma::vec tau;          // input eigenvalues
        arma::cx_mat eigenbasis; // set by waterfill_covariance
    };

    // Statistical waterfilling over the eigenvalues tau of T_tilde_m at linear
    // SNR rho: lambda solves (1/Nt) sum_a [1/lambda - 1/tau_a]_+ = rho by
    // monotone bisection, then the active set is re-closed in closed form so the
    // trace constraint holds to machine precision.
    WaterfillSolution waterfill(const arma::vec &tau, double rho);

    // Waterfilled covariance Q = U diag(q) U^dagger in the (deterministically
    // phased, descending) eigenbasis of T_tilde.
    WaterfillSolution waterfill_covariance(const arma::cx_mat &T_tilde, double rho,
                                           arma::cx_mat &Q_out);

    struct CovarianceResult
    {
        std::vector<arma::cx_mat> Q;
        FixedPointState state;
        double C = 0.0;
        arma::uword rounds = 0;
        std::vector<double> trace; // C after each fixed-point solve
    };

    // Alternates fixed-point solves with per-TX waterfilling on T_tilde_m until
    // C settles; C is non-decreasing across rounds.
    CovarianceResult alternate_covariance_fixedpoint(const CorrelationSet &correlations,
                                                     const PhaseConfig &phases,
                                                     const Subset &subset,
                                                     const FixedPointSettings &fp_settings = {},
                                                     double tolerance = 1e-9,
                                                     arma::uword max_rounds = 200);

} // namespace rismac

#endif
