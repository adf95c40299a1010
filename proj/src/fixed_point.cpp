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

#include "rismac/fixed_point.hpp"

namespace rismac
{
    namespace
    {
        double retrace(const arma::cx_mat &A) { return arma::trace(A).real(); }

        void check_inputs(const CorrelationSet &set, const std::vector<arma::cx_mat> &Q,
                          const Subset &subset)
        {
            if (Q.size() != set.M)
                throw config_error("fixed point: Q list must have M entries");
            if (subset.empty())
                throw config_error("fixed point: subset must be non-empty");
            for (arma::uword m : subset)
                if (m >= set.M)
                    throw config_error("fixed point: subset index out of range");
        }

        // sum_i s_i / (1 + c s_i)
        double resolvent_trace(const arma::vec &s, double c)
        {
            double acc = 0.0;
            for (arma::uword i = 0; i < s.n_elem; ++i)
                acc += s(i) / (1.0 + c * s(i));
            return acc;
        }

        // R_tilde = sum_active (r_dm sqrt(g_m) R_dm + sum_k r_1km R_k)
        arma::cx_mat build_r_tilde(const CorrelationSet &set, const FixedPointState &x,
                                   const Subset &subset)
        {
            arma::cx_mat Rt(set.Nr, set.Nr, arma::fill::zeros);
            for (arma::uword m : subset)
            {
                const double sg = std::sqrt(set.gamma_d(m));
                if (sg > 0.0 && x.r_d(m) != 0.0)
                    Rt += (x.r_d(m) * sg) * set.R_d[m];
                for (arma::uword k = 0; k < set.K; ++k)
                    if (x.r_1(k, m) != 0.0)
                        Rt += x.r_1(k, m) * set.R[k];
            }
            return Rt;
        }

        arma::cx_mat build_t_tilde(const CorrelationSet &set, const FixedPointState &x,
                                   arma::uword m)
        {
            arma::cx_mat Tt(set.Nt, set.Nt, arma::fill::zeros);
            const double sg = std::sqrt(set.gamma_d(m));
            if (sg > 0.0 && x.t_d(m) != 0.0)
                Tt += (x.t_d(m) * sg) * set.T_d[m];
            for (arma::uword k = 0; k < set.K; ++k)
                if (x.t_2(k, m) != 0.0)
                    Tt += x.t_2(k, m) * set.T[set.km(k, m)];
            return Tt;
        }

        // One full Jacobi evaluation F(x) of the six equation families.
        FixedPointState evaluate_map(const CorrelationSet &set, const SigmaSpectra &spectra,
                                     const std::vector<arma::cx_mat> &Q, const Subset &subset,
                                     const FixedPointState &x)
        {
            const double inv_nt = 1.0 / static_cast<double>(set.Nt);
            FixedPointState f = FixedPointState::zeros(set.M, set.K);

            const arma::cx_mat Rt = build_r_tilde(set, x, subset);
            arma::cx_mat Rbar_inv;
            if (!arma::inv_sympd(Rbar_inv, arma::cx_mat(set.Nr, set.Nr, arma::fill::eye) + Rt))
                throw numerical_error("fixed point: I + R_tilde is not invertible");

            for (arma::uword m : subset)
            {
                const double sg = std::sqrt(set.gamma_d(m));
                if (sg > 0.0)
                    f.t_d(m) = sg * inv_nt * retrace(Rbar_inv * set.R_d[m]);
            }
            for (arma::uword k = 0; k < set.K; ++k)
                f.t_1(k) = inv_nt * retrace(Rbar_inv * set.R[k]);

            for (arma::uword m : subset)
            {
                const arma::cx_mat Tt = build_t_tilde(set, x, m);
                arma::cx_mat Tbar_inv;
                if (!arma::inv(Tbar_inv, arma::cx_mat(set.Nt, set.Nt, arma::fill::eye) + Q[m] * Tt))
                    throw numerical_error("fixed point: I + Q T_tilde is not invertible");
                const double sg = std::sqrt(set.gamma_d(m));
                if (sg > 0.0)
                    f.r_d(m) = sg * inv_nt * retrace(Tbar_inv * Q[m] * set.T_d[m]);
                for (arma::uword k = 0; k < set.K; ++k)
                    f.r_2(k, m) = inv_nt * retrace(Tbar_inv * Q[m] * set.T[set.km(k, m)]);
            }

            for (arma::uword m : subset)
                for (arma::uword k = 0; k < set.K; ++k)
                {
                    const double c = x.t_1(k) * x.r_2(k, m);
                    const double tr = resolvent_trace(spectra[set.km(k, m)], c);
                    f.r_1(k, m) = x.r_2(k, m) * inv_nt * tr;
                    f.t_2(k, m) = x.t_1(k) * inv_nt * tr;
                }
            return f;
        }

        // One damped Gauss-Seidel sweep in the dependency order of the equations:
        // (t_d, t_1) from R_tilde, then (r_d, r_2) from T_tilde, then (r_1, t_2)
        // from the Sigma spectra, each stage seeing the stages before it.
        void gs_sweep(const CorrelationSet &set, const SigmaSpectra &spectra,
                      const std::vector<arma::cx_mat> &Q, const Subset &subset,
                      FixedPointState &x, double alpha)
        {
            const double inv_nt = 1.0 / static_cast<double>(set.Nt);

            const arma::cx_mat Rt = build_r_tilde(set, x, subset);
            arma::cx_mat Rbar_inv;
            if (!arma::inv_sympd(Rbar_inv, arma::cx_mat(set.Nr, set.Nr, arma::fill::eye) + Rt))
                throw numerical_error("fixed point: I + R_tilde is not invertible");
            for (arma::uword m : subset)
            {
                const double sg = std::sqrt(set.gamma_d(m));
                if (sg > 0.0)
                    x.t_d(m) += alpha * (sg * inv_nt * retrace(Rbar_inv * set.R_d[m]) - x.t_d(m));
            }
            for (arma::uword k = 0; k < set.K; ++k)
                x.t_1(k) += alpha * (inv_nt * retrace(Rbar_inv * set.R[k]) - x.t_1(k));

            for (arma::uword m : subset)
            {
                const arma::cx_mat Tt = build_t_tilde(set, x, m);
                arma::cx_mat Tbar_inv;
                if (!arma::inv(Tbar_inv, arma::cx_mat(set.Nt, set.Nt, arma::fill::eye) + Q[m] * Tt))
                    throw numerical_error("fixed point: I + Q T_tilde is not invertible");
                const double sg = std::sqrt(set.gamma_d(m));
                if (sg > 0.0)
                    x.r_d(m) += alpha * (sg * inv_nt * retrace(Tbar_inv * Q[m] * set.T_d[m]) - x.r_d(m));
                for (arma::uword k = 0; k < set.K; ++k)
                    x.r_2(k, m) += alpha * (inv_nt * retrace(Tbar_inv * Q[m] * set.T[set.km(k, m)]) -
                                            x.r_2(k, m));
            }

            for (arma::uword m : subset)
                for (arma::uword k = 0; k < set.K; ++k)
                {
                    const double c = x.t_1(k) * x.r_2(k, m);
                    const double tr = resolvent_trace(spectra[set.km(k, m)], c);
                    x.r_1(k, m) += alpha * (x.r_2(k, m) * inv_nt * tr - x.r_1(k, m));
                    x.t_2(k, m) += alpha * (x.t_1(k) * inv_nt * tr - x.t_2(k, m));
                }
        }

        double max_rel_diff(const FixedPointState &a, const FixedPointState &b)
        {
            auto rel = [](double u, double v) { return std::abs(u - v) / std::max(1.0, std::abs(v)); };
            double r = 0.0;
            for (arma::uword m = 0; m < a.t_d.n_elem; ++m)
            {
                r = std::max(r, rel(a.t_d(m), b.t_d(m)));
                r = std::max(r, rel(a.r_d(m), b.r_d(m)));
            }
            for (arma::uword k = 0; k < a.t_1.n_elem; ++k)
                r = std::max(r, rel(a.t_1(k), b.t_1(k)));
            for (arma::uword k = 0; k < a.r_1.n_rows; ++k)
                for (arma::uword m = 0; m < a.r_1.n_cols; ++m)
                {
                    r = std::max(r, rel(a.r_1(k, m), b.r_1(k, m)));
                    r = std::max(r, rel(a.t_2(k, m), b.t_2(k, m)));
                    r = std::max(r, rel(a.r_2(k, m), b.r_2(k, m)));
                }
            return r;
        }

    } // namespace

    SigmaSpectra sigma_spectra(const CorrelationSet &set, const PhaseConfig &phases)
    {
        if (phases.phases.size() != set.K)
            throw config_error("sigma_spectra: phase config does not match RIS count");
        const CorrelationFactors &f = set.factors();
        SigmaSpectra out(set.K * set.M);
        for (arma::uword k = 0; k < set.K; ++k)
        {
            const arma::cx_vec phi = phases.coefficients(k);
            if (phi.n_elem != set.Ns)
                throw config_error("sigma_spectra: phase vector length must be Ns");
            for (arma::uword m = 0; m < set.M; ++m)
            {
                const MatrixFactor &fr = f.S_r[k];
                const MatrixFactor &ft = f.S_t[set.km(k, m)];
                arma::vec s;
                if (fr.identity && ft.identity)
                    s = arma::vec(set.Ns, arma::fill::ones); // Phi^dagger Phi = I
                else if (fr.identity)
                    s = ft.d;
                else if (ft.identity)
                    s = fr.d;
                else
                {
                    // Sigma = X^dagger X with X = S_r^{1/2} Phi S_t^{1/2}; its nonzero
                    // eigenvalues are the squared singular values of
                    // diag(sqrt d_r) (U_r^dagger Phi U_t) diag(sqrt d_t).
                    arma::cx_mat G = fr.U.t() * (ft.U.each_col() % phi);
                    for (arma::uword i = 0; i < G.n_rows; ++i)
                        for (arma::uword j = 0; j < G.n_cols; ++j)
                            G(i, j) *= std::sqrt(fr.d(i)) * std::sqrt(ft.d(j));
                    arma::vec sv = arma::svd(G);
                    s = arma::square(sv);
                }
                out[set.km(k, m)] = arma::sort(s, "descend");
            }
        }
        return out;
    }

    arma::cx_mat assemble_sigma(const CorrelationSet &set, const PhaseConfig &phases,
                                arma::uword k, arma::uword m)
    {
        const arma::cx_vec phi = phases.coefficients(k);
        const arma::cx_mat sq = set.factors().S_t[set.km(k, m)].sqrt_full();
        const arma::cx_mat B = sq.each_col() % phi; // Phi S_t^{1/2}
        arma::cx_mat Sigma = B.t() * set.S_r[k] * B;
        return 0.5 * (Sigma + Sigma.t());
    }

    EffectiveMatrices effective_matrices(const CorrelationSet &set, const PhaseConfig &phases,
                                         const FixedPointState &state, const Subset &subset)
    {
        EffectiveMatrices em;
        em.R_tilde = build_r_tilde(set, state, subset);
        em.T_tilde.resize(set.M);
        for (arma::uword m = 0; m < set.M; ++m)
            em.T_tilde[m] = build_t_tilde(set, state, m);
        em.Sigma.resize(set.K * set.M);
        for (arma::uword k = 0; k < set.K; ++k)
            for (arma::uword m = 0; m < set.M; ++m)
                em.Sigma[set.km(k, m)] = assemble_sigma(set, phases, k, m);
        return em;
    }

    double equation_residual(const CorrelationSet &set, const SigmaSpectra &spectra,
                             const std::vector<arma::cx_mat> &Q, const Subset &subset,
                             const FixedPointState &state)
    {
        return max_rel_diff(evaluate_map(set, spectra, Q, subset, state), state);
    }

    void fixed_point_sweep(const CorrelationSet &set, const SigmaSpectra &spectra,
                           const std::vector<arma::cx_mat> &Q, const Subset &subset,
                           FixedPointState &state, double damping)
    {
        gs_sweep(set, spectra, Q, subset, state, damping);
    }

    arma::cx_mat t_tilde_matrix(const CorrelationSet &set, const FixedPointState &state,
                                arma::uword m)
    {
        return build_t_tilde(set, state, m);
    }

    FixedPointState solve_fixed_point(const CorrelationSet &set, const SigmaSpectra &spectra,
                                      const std::vector<arma::cx_mat> &Q, const Subset &subset,
                                      const FixedPointSettings &settings)
    {
        check_inputs(set, Q, subset);
        FixedPointState x = FixedPointState::zeros(set.M, set.K);
        if (settings.init == FixedPointSettings::Init::ones)
        {
            x.t_d.ones();
            x.r_d.ones();
            x.t_1.ones();
            x.r_1.ones();
            x.t_2.ones();
            x.r_2.ones();
            // d-parameters stay 0 when the direct path is absent
            for (arma::uword m = 0; m < set.M; ++m)
                if (set.gamma_d(m) == 0.0)
                {
                    x.t_d(m) = 0.0;
                    x.r_d(m) = 0.0;
                }
        }
        else
        {
            // one undamped forward step: the interference-free first iterate
            x = evaluate_map(set, spectra, Q, subset, x);
        }

        double alpha = settings.damping;
        double prev = arma::datum::inf;
        for (arma::uword it = 0; it < settings.max_iter; ++it)
        {
            const double res = equation_residual(set, spectra, Q, subset, x);
            if (res < settings.tolerance)
            {
                x.iterations = it + 1;
                x.residual = res;
                return x;
            }
            if (res > prev * (1.0 + 1e-12))
                alpha = std::max(alpha * 0.5, 1.0 / 64.0); // oscillation: damp harder
            prev = res;
            gs_sweep(set, spectra, Q, subset, x, alpha);
        }
        const double res = equation_residual(set, spectra, Q, subset, x);
        throw convergence_error("fixed point: no convergence after " +
                                    std::to_string(settings.max_iter) +
                                    " iterations (residual " + std::to_string(res) + ")",
                                res);
    }

    FixedPointState solve_fixed_point(const CorrelationSet &set, const PhaseConfig &phases,
                                      const std::vector<arma::cx_mat> &Q, const Subset &subset,
                                      const FixedPointSettings &settings)
    {
        return solve_fixed_point(set, sigma_spectra(set, phases), Q, subset, settings);
    }

    double ergodic_mi(const CorrelationSet &set, const SigmaSpectra &spectra,
                      const std::vector<arma::cx_mat> &Q, const Subset &subset,
                      const FixedPointState &x)
    {
        check_inputs(set, Q, subset);
        const double inv_nt = 1.0 / static_cast<double>(set.Nt);

        double val = 0.0;
        const arma::cx_mat Rt = build_r_tilde(set, x, subset);
        arma::cx_mat L;
        if (!arma::chol(L, arma::cx_mat(set.Nr, set.Nr, arma::fill::eye) + Rt, "lower"))
            throw numerical_error("ergodic_mi: I + R_tilde is not positive definite");
        val += 2.0 * arma::accu(arma::log(arma::abs(L.diag()))) * inv_nt;

        double correction = 0.0;
        for (arma::uword m : subset)
        {
            for (arma::uword k = 0; k < set.K; ++k)
            {
                const double c = x.t_1(k) * x.r_2(k, m);
                const arma::vec &s = spectra[set.km(k, m)];
                double ld = 0.0;
                for (arma::uword i = 0; i < s.n_elem; ++i)
                    ld += std::log1p(c * s(i));
                val += ld * inv_nt;
                correction += x.r_1(k, m) * x.t_1(k) + x.r_2(k, m) * x.t_2(k, m);
            }
            const arma::cx_mat Tt = build_t_tilde(set, x, m);
            const std::complex<double> ld =
                arma::log_det(arma::cx_mat(set.Nt, set.Nt, arma::fill::eye) + Q[m] * Tt);
            val += ld.real() * inv_nt;
            correction += x.r_d(m) * x.t_d(m);
        }
        val -= correction;
        if (val < -1e-9)
            throw numerical_error("ergodic_mi: negative value " + std::to_string(val));
        return std::max(val, 0.0);
    }

    double ergodic_mi(const CorrelationSet &set, const PhaseConfig &phases,
                      const std::vector<arma::cx_mat> &Q, const Subset &subset,
                      const FixedPointState &state)
    {
        return ergodic_mi(set, sigma_spectra(set, phases), Q, subset, state);
    }

} // namespace rismac
