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

#include "rismac/variance.hpp"

namespace rismac
{
    namespace
    {
        double retrace(const arma::cx_mat &A) { return arma::trace(A).real(); }

        // sum_i f(s_i) over a Sigma spectrum
        double spectral_sum(const arma::vec &s, double c, int sigma_power)
        {
            double acc = 0.0;
            for (arma::uword i = 0; i < s.n_elem; ++i)
            {
                const double den = 1.0 + c * s(i);
                acc += (sigma_power == 2 ? s(i) * s(i) : s(i)) / (den * den);
            }
            return acc;
        }
    } // namespace

    LambdaBlocks assemble_lambda(const CorrelationSet &set, const SigmaSpectra &spectra,
                                 const std::vector<arma::cx_mat> &Q, const FixedPointState &x)
    {
        if (Q.size() != set.M)
            throw config_error("assemble_lambda: Q list must have M entries");
        const arma::uword M = set.M, K = set.K, MK = M * K;
        const double inv_nt = 1.0 / static_cast<double>(set.Nt);
        const Subset everyone = all_users(M);

        LambdaBlocks b;
        b.M = M;
        b.K = K;
        b.M_dt.zeros(M, M);
        b.M_dr.zeros(M, M);
        b.M_1t.zeros(MK, MK);
        b.M_2r.zeros(MK, MK);
        b.M_12.zeros(MK, MK);
        b.M_2t.zeros(MK, MK);
        b.M_1r.zeros(MK, MK);
        b.M_1dr.zeros(MK, M);
        b.M_2dt.zeros(MK, M);

        // Rbar^{-1} and the per-m Tbar^{-1} Q
        arma::cx_mat Rt(set.Nr, set.Nr, arma::fill::zeros);
        for (arma::uword m = 0; m < M; ++m)
        {
            const double sg = std::sqrt(set.gamma_d(m));
            if (sg > 0.0 && x.r_d(m) != 0.0)
                Rt += (x.r_d(m) * sg) * set.R_d[m];
            for (arma::uword k = 0; k < K; ++k)
                if (x.r_1(k, m) != 0.0)
                    Rt += x.r_1(k, m) * set.R[k];
        }
        arma::cx_mat Rbar_inv;
        if (!arma::inv_sympd(Rbar_inv, arma::cx_mat(set.Nr, set.Nr, arma::fill::eye) + Rt))
            throw numerical_error("assemble_lambda: I + R_tilde is not invertible");

        std::vector<arma::cx_mat> TbinvQ(M); // Tbar_m^{-1} Q_m
        for (arma::uword m = 0; m < M; ++m)
        {
            arma::cx_mat Tt(set.Nt, set.Nt, arma::fill::zeros);
            const double sg = std::sqrt(set.gamma_d(m));
            if (sg > 0.0 && x.t_d(m) != 0.0)
                Tt += (x.t_d(m) * sg) * set.T_d[m];
            for (arma::uword k = 0; k < K; ++k)
                if (x.t_2(k, m) != 0.0)
                    Tt += x.t_2(k, m) * set.T[set.km(k, m)];
            arma::cx_mat Tbar_inv;
            if (!arma::inv(Tbar_inv, arma::cx_mat(set.Nt, set.Nt, arma::fill::eye) + Q[m] * Tt))
                throw numerical_error("assemble_lambda: I + Q T_tilde is not invertible");
            TbinvQ[m] = Tbar_inv * Q[m];
        }

        // d-blocks (carry sqrt(gamma) per R_dm / T_dm factor)
        std::vector<arma::cx_mat> RbRd(M), TbQTd(M);
        for (arma::uword m = 0; m < M; ++m)
        {
            const double sg = std::sqrt(set.gamma_d(m));
            RbRd[m] = sg * (Rbar_inv * set.R_d[m]);
            TbQTd[m] = sg * (TbinvQ[m] * set.T_d[m]);
        }
        for (arma::uword m = 0; m < M; ++m)
        {
            b.M_dt(m, m) = -inv_nt * retrace(TbQTd[m] * TbQTd[m]);
            for (arma::uword mp = 0; mp < M; ++mp)
                b.M_dr(m, mp) = -inv_nt * retrace(RbRd[m] * RbRd[mp]);
        }

        // k-blocks
        std::vector<arma::cx_mat> RbRk(K);
        for (arma::uword k = 0; k < K; ++k)
            RbRk[k] = Rbar_inv * set.R[k];

        for (arma::uword k = 0; k < K; ++k)
            for (arma::uword m = 0; m < M; ++m)
            {
                const arma::uword i = k * M + m;
                const double c = x.t_1(k) * x.r_2(k, m);
                const arma::vec &s = spectra[set.km(k, m)];
                const double q1 = spectral_sum(s, c, 1); // Tr Sbar^{-2} Sigma
                const double q2 = spectral_sum(s, c, 2); // Tr Sbar^{-2} Sigma^2
                b.M_1t(i, i) = -x.r_2(k, m) * x.r_2(k, m) * inv_nt * q2;
                b.M_2r(i, i) = -x.t_1(k) * x.t_1(k) * inv_nt * q2;
                b.M_12(i, i) = inv_nt * q1;

                const arma::cx_mat TbQTk = TbinvQ[m] * set.T[set.km(k, m)];
                b.M_2dt(i, m) = -inv_nt * retrace(TbQTk * TbQTd[m]);
                for (arma::uword kp = 0; kp < K; ++kp)
                {
                    b.M_2t(i, kp * M + m) =
                        -inv_nt * retrace(TbQTk * (TbinvQ[m] * set.T[set.km(kp, m)]));
                    for (arma::uword mp = 0; mp < M; ++mp)
                        b.M_1r(i, kp * M + mp) = -inv_nt * retrace(RbRk[k] * RbRk[kp]);
                }
                for (arma::uword mp = 0; mp < M; ++mp)
                    b.M_1dr(i, mp) = -inv_nt * retrace(RbRk[k] * RbRd[mp]);
            }

        // Lambda layout, Eq.-(35) block order [dt, 1t, 2t, dr, 1r, 2r]
        const arma::uword D = b.dim();
        b.Lambda.zeros(D, D);
        const arma::uword o_dt = 0, o_1t = M, o_2t = M + MK, o_dr = M + 2 * MK,
                          o_1r = 2 * M + 2 * MK, o_2r = 2 * M + 3 * MK;
        auto put = [&](arma::uword r, arma::uword c, const arma::mat &blk) {
            if (blk.n_rows == 0 || blk.n_cols == 0)
                return; // K = 0 leaves the RIS blocks empty
            b.Lambda.submat(r, c, r + blk.n_rows - 1, c + blk.n_cols - 1) = blk;
        };
        const arma::mat eyeM = arma::eye(M, M);
        const arma::mat eyeMK = arma::eye(MK, MK);
        put(o_dt, o_dt, b.M_dt);
        put(o_dt, o_2t, b.M_2dt.t());
        put(o_dt, o_dr, -eyeM);
        put(o_1t, o_1t, b.M_1t);
        put(o_1t, o_1r, -eyeMK);
        put(o_1t, o_2r, b.M_12);
        put(o_2t, o_dt, b.M_2dt);
        put(o_2t, o_2t, b.M_2t);
        put(o_2t, o_2r, -eyeMK);
        put(o_dr, o_dt, -eyeM);
        put(o_dr, o_dr, b.M_dr);
        put(o_dr, o_1r, b.M_1dr.t());
        put(o_1r, o_1t, -eyeMK);
        put(o_1r, o_dr, b.M_1dr);
        put(o_1r, o_1r, b.M_1r);
        put(o_2r, o_1t, b.M_12);
        put(o_2r, o_2t, -eyeMK);
        put(o_2r, o_2r, b.M_2r);
        return b;
    }

    LambdaBlocks assemble_lambda(const CorrelationSet &set, const PhaseConfig &phases,
                                 const std::vector<arma::cx_mat> &Q, const FixedPointState &state)
    {
        return assemble_lambda(set, sigma_spectra(set, phases), Q, state);
    }

    double variance(const LambdaBlocks &blocks)
    {
        double logabs = 0.0, sign = 0.0;
        arma::log_det(logabs, sign, blocks.Lambda);
        const double parity = (blocks.M % 2 == 0) ? 1.0 : -1.0;
        if (!(sign * parity > 0.0))
            throw numerical_error("variance: signed det Lambda is non-positive (sign " +
                                  std::to_string(sign) + ", log|det| " + std::to_string(logabs) + ")");
        const double var = -logabs;
        if (var < -1e-12)
            throw numerical_error("variance: -log det Lambda is negative (" +
                                  std::to_string(var) + ")");
        return std::max(var, 0.0);
    }

    double gaussian_outage(double mean_total, double var, double rate)
    {
        if (!(var > 0.0))
            throw numerical_error("gaussian_outage: variance must be > 0");
        const double z = (rate - mean_total) / std::sqrt(var);
        return 0.5 * std::erfc(-z / std::sqrt(2.0));
    }

} // namespace rismac
