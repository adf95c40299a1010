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

#include "rismac/channel.hpp"

namespace rismac
{
    namespace
    {
        arma::cx_mat iid_gaussian(arma::uword rows, arma::uword cols, std::mt19937_64 &gen)
        {
            arma::cx_mat W(rows, cols);
            for (arma::uword j = 0; j < cols; ++j) // column-major fill order is part of the seed contract
                for (arma::uword i = 0; i < rows; ++i)
                    W(i, j) = complex_gaussian(gen);
            return W;
        }

        // scale * A^{1/2} W (B^{1/2})^T with W iid CN(0,1): the plain transpose on
        // the column side makes the entry covariance A_ij B_ln exactly (a
        // Hermitian right factor would give conj(B_ln)). Drawn in the truncated
        // eigenbases, U_A D_A^{1/2} W' D_B^{1/2} U_B^T, which has the same
        // distribution by unitary invariance and skips the dead directions.
        arma::cx_mat correlated_draw(const MatrixFactor &A, const MatrixFactor &B, double scale,
                                     std::mt19937_64 &gen)
        {
            if (A.identity && B.identity)
                return scale * iid_gaussian(A.n, B.n, gen);
            arma::cx_mat W = iid_gaussian(A.rank(), B.rank(), gen);
            if (!A.identity)
            {
                for (arma::uword j = 0; j < W.n_cols; ++j)
                    for (arma::uword i = 0; i < W.n_rows; ++i)
                        W(i, j) *= std::sqrt(A.d(i));
                W = A.U * W;
            }
            if (!B.identity)
            {
                for (arma::uword j = 0; j < W.n_cols; ++j)
                {
                    const double s = std::sqrt(B.d(j));
                    for (arma::uword i = 0; i < W.n_rows; ++i)
                        W(i, j) *= s;
                }
                W = W * B.U.st();
            }
            return scale * W;
        }
    } // namespace

    std::vector<arma::cx_mat> uniform_covariance(arma::uword M, arma::uword Nt, double rho)
    {
        std::vector<arma::cx_mat> Q(M, rho * arma::cx_mat(Nt, Nt, arma::fill::eye));
        return Q;
    }

    ChannelRealization sample_channels(const CorrelationSet &set, std::uint64_t seed)
    {
        const CorrelationFactors &f = set.factors();
        std::mt19937_64 gen(splitmix64(seed));
        ChannelRealization r;
        r.seed = seed;
        const double inv_nt = 1.0 / static_cast<double>(set.Nt);

        r.G_d.resize(set.M);
        for (arma::uword m = 0; m < set.M; ++m)
        {
            if (set.gamma_d(m) == 0.0)
            {
                r.G_d[m].zeros(set.Nr, set.Nt);
                // keep the stream layout independent of gamma so seeds stay comparable
                (void)iid_gaussian(f.R_d[m].rank(), f.T_d[m].rank(), gen);
            }
            else
                r.G_d[m] = correlated_draw(f.R_d[m], f.T_d[m],
                                           std::sqrt(set.gamma_d(m) * inv_nt), gen);
        }
        r.G_r.resize(set.K);
        for (arma::uword k = 0; k < set.K; ++k)
            r.G_r[k] = correlated_draw(f.R[k], f.S_r[k], std::sqrt(inv_nt), gen);
        r.G_t.resize(set.K * set.M);
        for (arma::uword k = 0; k < set.K; ++k)
            for (arma::uword m = 0; m < set.M; ++m)
                r.G_t[set.km(k, m)] =
                    correlated_draw(f.S_t[set.km(k, m)], f.T[set.km(k, m)], std::sqrt(inv_nt), gen);
        return r;
    }

    std::vector<arma::cx_mat> total_channel(const ChannelRealization &real,
                                            const PhaseConfig &phases)
    {
        const arma::uword M = real.G_d.size();
        const arma::uword K = real.G_r.size();
        if (phases.phases.size() != K)
            throw config_error("total_channel: phase config does not match RIS count");
        std::vector<arma::cx_vec> coef(K);
        for (arma::uword k = 0; k < K; ++k)
            coef[k] = phases.coefficients(k);

        std::vector<arma::cx_mat> G(M);
        for (arma::uword m = 0; m < M; ++m)
        {
            G[m] = real.G_d[m];
            for (arma::uword k = 0; k < K; ++k)
                G[m] += (real.G_r[k].each_row() % coef[k].st()) * real.G_t[k * M + m];
        }
        return G;
    }

    double instantaneous_mi(const std::vector<arma::cx_mat> &G_tot,
                            const std::vector<arma::cx_mat> &Q, const Subset &subset,
                            double rho)
    {
        if (G_tot.empty())
            throw config_error("instantaneous_mi: empty channel list");
        const arma::uword Nr = G_tot.front().n_rows;
        const arma::uword Nt = G_tot.front().n_cols;
        arma::cx_mat A(Nr, Nr, arma::fill::eye);
        for (arma::uword m : subset)
        {
            if (m >= G_tot.size() || m >= Q.size())
                throw config_error("instantaneous_mi: subset index out of range");
            const double tr = arma::trace(Q[m]).real();
            if (tr > rho * static_cast<double>(Nt) + 1e-9)
                throw config_error("instantaneous_mi: Tr Q_m exceeds the power constraint");
            A += G_tot[m] * Q[m] * G_tot[m].t();
        }
        arma::cx_mat L;
        if (arma::chol(L, A, "lower"))
            return 2.0 * arma::accu(arma::log(arma::abs(L.diag())));
        // Cholesky can only fail here through rounding; clip and retry once.
        arma::vec ev;
        if (!arma::eig_sym(ev, A))
            throw numerical_error("instantaneous_mi: eigendecomposition failed");
        if (ev.min() < -1e-8 * std::max(ev.max(), 1.0))
            throw numerical_error("instantaneous_mi: log det argument is indefinite");
        double v = 0.0;
        for (arma::uword i = 0; i < ev.n_elem; ++i)
            v += std::log(std::max(ev(i), 1.0));
        return v;
    }

    namespace
    {
        McStatistics reduce_samples(std::vector<double> samples)
        {
            McStatistics out;
            const std::size_t n = samples.size();
            out.mean = pairwise_sum(samples) / static_cast<double>(n);
            std::vector<double> sq(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                const double d = samples[i] - out.mean;
                sq[i] = d * d;
            }
            out.variance = n > 1 ? pairwise_sum(sq) / static_cast<double>(n - 1) : 0.0;
            out.se_mean = std::sqrt(out.variance / static_cast<double>(n));
            out.se_variance = out.variance * std::sqrt(2.0 / std::max<std::size_t>(n - 1, 1));
            std::sort(samples.begin(), samples.end());
            out.sorted_samples = arma::vec(samples);
            return out;
        }
    } // namespace

    std::vector<McStatistics> mc_statistics_multi(const CorrelationSet &set,
                                                  const PhaseConfig &phases,
                                                  const std::vector<arma::cx_mat> &Q,
                                                  const std::vector<Subset> &subsets,
                                                  arma::uword n_draws, std::uint64_t seed,
                                                  unsigned threads)
    {
        if (n_draws < 2)
            throw config_error("mc_statistics: n_draws must be >= 2");
        const std::size_t ns = subsets.size();
        std::vector<std::vector<double>> samples(ns, std::vector<double>(n_draws));
        parallel_for(n_draws, threads, [&](std::size_t i) {
            const ChannelRealization real = sample_channels(set, draw_seed(seed, i));
            const std::vector<arma::cx_mat> G = total_channel(real, phases);
            for (std::size_t j = 0; j < ns; ++j)
                samples[j][i] = instantaneous_mi(G, Q, subsets[j], set.rho);
        });
        std::vector<McStatistics> out;
        out.reserve(ns);
        for (std::size_t j = 0; j < ns; ++j)
            out.push_back(reduce_samples(std::move(samples[j])));
        return out;
    }

    McStatistics mc_statistics(const CorrelationSet &set, const PhaseConfig &phases,
                               const std::vector<arma::cx_mat> &Q, const Subset &subset,
                               arma::uword n_draws, std::uint64_t seed, unsigned threads)
    {
        return mc_statistics_multi(set, phases, Q, {subset}, n_draws, seed, threads).front();
    }

} // namespace rismac
