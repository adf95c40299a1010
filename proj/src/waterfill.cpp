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

#include "rismac/waterfill.hpp"

namespace rismac
{
    WaterfillSolution waterfill(const arma::vec &tau, double rho)
    {
        const arma::uword n = tau.n_elem;
        if (n == 0)
            throw config_error("waterfill: empty eigenvalue vector");
        if (!(rho > 0.0))
            throw config_error("waterfill: rho must be > 0");
        double tau_max = 0.0, tau_min_active = arma::datum::inf;
        for (arma::uword a = 0; a < n; ++a)
        {
            if (tau(a) < -1e-12)
                throw config_error("waterfill: negative eigenvalue");
            tau_max = std::max(tau_max, tau(a));
            if (tau(a) > 0.0)
                tau_min_active = std::min(tau_min_active, tau(a));
        }
        if (!(tau_max > 0.0))
            throw numerical_error("waterfill: all eigenvalues are zero (no channel)");

        const double inv_n = 1.0 / static_cast<double>(n);
        auto g = [&](double lambda) {
            double acc = 0.0;
            for (arma::uword a = 0; a < n; ++a)
                if (tau(a) > lambda)
                    acc += 1.0 / lambda - 1.0 / tau(a);
            return acc * inv_n;
        };

        double lo = tau_min_active * std::exp(-40.0), hi = tau_max;
        // g decreases from huge to 0 on [lo, hi]
        while (g(lo) < rho)
            lo *= 0.5;
        for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > rho ? lo : hi) = mid;
        }
        double lambda = 0.5 * (lo + hi);

        // close the active set exactly
        double inv_sum = 0.0;
        arma::uword active = 0;
        for (arma::uword a = 0; a < n; ++a)
            if (tau(a) > lambda)
            {
                inv_sum += 1.0 / tau(a);
                ++active;
            }
        if (active > 0)
        {
            const double lambda_exact =
                static_cast<double>(active) / (rho * static_cast<double>(n) + inv_sum);
            bool consistent = true;
            for (arma::uword a = 0; a < n; ++a)
            {
                const bool in = tau(a) > lambda;
                if (in != (tau(a) > lambda_exact))
                    consistent = false;
            }
            if (consistent)
                lambda = lambda_exact;
        }

        WaterfillSolution sol;
        sol.tau = tau;
        sol.water_level = lambda;
        sol.powers.zeros(n);
        sol.objective = 0.0;
        for (arma::uword a = 0; a < n; ++a)
            if (tau(a) > lambda)
            {
                sol.powers(a) = 1.0 / lambda - 1.0 / tau(a);
                sol.objective += std::log(tau(a) / lambda);
            }
        return sol;
    }

    WaterfillSolution waterfill_covariance(const arma::cx_mat &T_tilde, double rho,
                                           arma::cx_mat &Q_out)
    {
        arma::vec ev;
        arma::cx_mat V;
        if (!arma::eig_sym(ev, V, 0.5 * (T_tilde + T_tilde.t())))
            throw numerical_error("waterfill_covariance: eigendecomposition failed");
        const arma::uword n = ev.n_elem;
        // descending order with a fixed phase convention for reproducibility
        arma::vec tau(n);
        arma::cx_mat U(n, n);
        for (arma::uword j = 0; j < n; ++j)
        {
            const arma::uword src = n - 1 - j;
            tau(j) = std::max(ev(src), 0.0);
            arma::cx_vec u = V.col(src);
            std::complex<double> ph = u(arma::abs(u).index_max());
            ph /= std::abs(ph);
            U.col(j) = u / ph;
        }
        WaterfillSolution sol = waterfill(tau, rho);
        sol.eigenbasis = U;
        Q_out = U * arma::diagmat(arma::cx_vec(sol.powers,
                                               arma::vec(n, arma::fill::zeros))) *
                U.t();
        Q_out = 0.5 * (Q_out + Q_out.t());
        return sol;
    }

    CovarianceResult alternate_covariance_fixedpoint(const CorrelationSet &set,
                                                     const PhaseConfig &phases,
                                                     const Subset &subset,
                                                     const FixedPointSettings &fp_settings,
                                                     double tolerance, arma::uword max_rounds)
    {
        const SigmaSpectra spectra = sigma_spectra(set, phases);
        CovarianceResult out;
        out.Q = uniform_covariance(set.M, set.Nt, set.rho);
        double prev = -arma::datum::inf;
        for (arma::uword round = 0; round < max_rounds; ++round)
        {
            out.state = solve_fixed_point(set, spectra, out.Q, subset, fp_settings);
            out.C = ergodic_mi(set, spectra, out.Q, subset, out.state);
            out.trace.push_back(out.C);
            out.rounds = round + 1;
            if (std::abs(out.C - prev) < tolerance * std::max(1.0, std::abs(out.C)))
                return out;
            prev = out.C;
            for (arma::uword m : subset)
            {
                const arma::cx_mat Tt = t_tilde_matrix(set, out.state, m);
                if (arma::norm(Tt, "fro") < 1e-300)
                    throw numerical_error("alternate_covariance: T_tilde vanished (no channel)");
                waterfill_covariance(Tt, set.rho, out.Q[m]);
            }
        }
        throw convergence_error("alternate_covariance: no convergence after " +
                                    std::to_string(max_rounds) + " rounds",
                                std::abs(out.C - prev));
    }

} // namespace rismac
