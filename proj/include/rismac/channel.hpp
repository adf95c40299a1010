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

#ifndef rismac_channel_H
#define rismac_channel_H

#include <vector>

#include <armadillo>

#include "rismac/common.hpp"
#include "rismac/correlation.hpp"

namespace rismac
{
    // RIS phase configuration: phases[k](n) holds phi_{k,n} in radians,
    // reflection coefficient exp(i phi_{k,n}) is unit modulus by construction.
    struct PhaseConfig
    {
        std::vector<arma::vec> phases; // [K] x Ns

        static PhaseConfig identity(arma::uword K, arma::uword Ns)
        {
            PhaseConfig p;
            p.phases.assign(K, arma::vec(Ns, arma::fill::zeros));
            return p;
        }

        arma::cx_vec coefficients(arma::uword k) const
        {
            arma::cx_vec c(phases[k].n_elem);
            for (arma::uword n = 0; n < c.n_elem; ++n)
                c(n) = std::polar(1.0, phases[k](n));
            return c;
        }
    };

    // One exact draw of all channel matrices.
    struct ChannelRealization
    {
        std::vector<arma::cx_mat> G_d; // [M]   Nr x Nt
        std::vector<arma::cx_mat> G_r; // [K]   Nr x Ns
        std::vector<arma::cx_mat> G_t; // [K*M] Ns x Nt
        std::uint64_t seed = 0;
    };

    // Kronecker-correlated draw: G_dm = sqrt(gamma_m / Nt) R_dm^{1/2} W T_dm^{1/2},
    // G_rk = sqrt(1/Nt) R_k^{1/2} W' S_rk^{1/2}, G_tkm = sqrt(1/Nt) S_tkm^{1/2} W'' T_km^{1/2},
    // all W iid CN(0,1). Deterministic given the seed.
    ChannelRealization sample_channels(const CorrelationSet &correlations, std::uint64_t seed);

    // G_tot,m = G_dm + sum_k G_rk diag(e^{i phi_k}) G_tkm.
    std::vector<arma::cx_mat> total_channel(const ChannelRealization &realization,
                                            const PhaseConfig &phases);

    // log det(I + sum_{m in subset} G_m Q_m G_m^dagger) in nats, via Cholesky.
    double instantaneous_mi(const std::vector<arma::cx_mat> &G_tot,
                            const std::vector<arma::cx_mat> &Q, const Subset &subset,
                            double rho);

    struct McStatistics
    {
        double mean = 0.0;
        double variance = 0.0; // unbiased
        double se_mean = 0.0;
        double se_variance = 0.0;
        arma::vec sorted_samples; // raw empirical CDF support
    };

    // Monte Carlo sum-MI statistics over n_draws independent realizations.
    // Per-draw seeds derive from (seed, draw index); aggregation is a fixed
    // pairwise reduction, so any thread count gives identical output.
    McStatistics mc_statistics(const CorrelationSet &correlations, const PhaseConfig &phases,
                               const std::vector<arma::cx_mat> &Q, const Subset &subset,
                               arma::uword n_draws, std::uint64_t seed, unsigned threads = 0);

    // Same pass, evaluating the MI of several nested subsets from shared draws
    // (column j of the result holds the samples of subsets[j]).
    std::vector<McStatistics> mc_statistics_multi(const CorrelationSet &correlations,
                                                  const PhaseConfig &phases,
                                                  const std::vector<arma::cx_mat> &Q,
                                                  const std::vector<Subset> &subsets,
                                                  arma::uword n_draws, std::uint64_t seed,
                                                  unsigned threads = 0);

    // Q_m = rho I for every TX (the section-V default).
    std::vector<arma::cx_mat> uniform_covariance(arma::uword M, arma::uword Nt, double rho);

} // namespace rismac

#endif
