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

#include "rismac/region.hpp"

#include <numeric>

namespace rismac
{
    namespace
    {
        arma::uvec priority_order(const arma::vec &mu)
        {
            std::vector<arma::uword> idx(mu.n_elem);
            std::iota(idx.begin(), idx.end(), arma::uword(0));
            std::stable_sort(idx.begin(), idx.end(),
                             [&](arma::uword a, arma::uword b) { return mu(a) > mu(b); });
            return arma::uvec(idx);
        }

        // Phase-1 simplex feasibility for {lambda >= 0, sum lambda = 1,
        // P lambda - s = r, s >= 0}; Bland's rule, dense tableau.
        bool lp_dominated(const arma::mat &P, const arma::vec &r)
        {
            const arma::uword npts = P.n_cols, dim = P.n_rows;
            const arma::uword rows = dim + 1;
            const arma::uword nvar = npts + dim; // lambdas then surpluses
            arma::mat A(rows, nvar, arma::fill::zeros);
            arma::vec b(rows);
            for (arma::uword i = 0; i < dim; ++i)
            {
                for (arma::uword j = 0; j < npts; ++j)
                    A(i, j) = P(i, j);
                A(i, npts + i) = -1.0;
                b(i) = r(i);
            }
            for (arma::uword j = 0; j < npts; ++j)
                A(dim, j) = 1.0;
            b(dim) = 1.0;
            for (arma::uword i = 0; i < rows; ++i)
                if (b(i) < 0.0)
                {
                    A.row(i) *= -1.0;
                    b(i) *= -1.0;
                }

            // tableau with one artificial per row; minimize their sum
            const arma::uword total = nvar + rows;
            arma::mat T(rows + 1, total + 1, arma::fill::zeros);
            T.submat(0, 0, rows - 1, nvar - 1) = A;
            for (arma::uword i = 0; i < rows; ++i)
            {
                T(i, nvar + i) = 1.0;
                T(i, total) = b(i);
            }
            std::vector<arma::uword> basis(rows);
            for (arma::uword i = 0; i < rows; ++i)
                basis[i] = nvar + i;
            // objective row: cost 1 on artificials, expressed in reduced form
            for (arma::uword j = 0; j <= total; ++j)
            {
                double acc = 0.0;
                for (arma::uword i = 0; i < rows; ++i)
                    acc += T(i, j);
                T(rows, j) = (j >= nvar && j < total) ? acc - 1.0 : acc;
            }

            for (int iter = 0; iter < 10000; ++iter)
            {
                arma::sword pivot_col = -1;
                for (arma::uword j = 0; j < total; ++j)
                    if (T(rows, j) > 1e-11)
                    {
                        pivot_col = static_cast<arma::sword>(j);
                        break; // Bland: smallest index
                    }
                if (pivot_col < 0)
                    break;
                arma::sword pivot_row = -1;
                double best_ratio = arma::datum::inf;
                for (arma::uword i = 0; i < rows; ++i)
                {
                    const double a = T(i, pivot_col);
                    if (a > 1e-11)
                    {
                        const double ratio = T(i, total) / a;
                        if (ratio < best_ratio - 1e-12 ||
                            (std::abs(ratio - best_ratio) <= 1e-12 &&
                             (pivot_row < 0 || basis[i] < basis[pivot_row])))
                        {
                            best_ratio = ratio;
                            pivot_row = static_cast<arma::sword>(i);
                        }
                    }
                }
                if (pivot_row < 0)
                    break; // unbounded: cannot happen for phase 1
                const double p = T(pivot_row, pivot_col);
                T.row(pivot_row) /= p;
                for (arma::uword i = 0; i <= rows; ++i)
                    if (i != static_cast<arma::uword>(pivot_row) && std::abs(T(i, pivot_col)) > 0.0)
                        T.row(i) -= T(i, pivot_col) * T.row(pivot_row);
                basis[pivot_row] = static_cast<arma::uword>(pivot_col);
            }
            return T(rows, total) < 1e-8; // residual artificial mass
        }
    } // namespace

    std::vector<arma::vec> mu_grid_two_users(arma::uword n_points)
    {
        std::vector<arma::vec> grid;
        for (arma::uword i = 0; i < n_points; ++i)
        {
            const double mu1 = n_points > 1
                                   ? static_cast<double>(i) / static_cast<double>(n_points - 1)
                                   : 1.0;
            grid.push_back(arma::vec{mu1, 1.0 - mu1});
        }
        return grid;
    }

    std::vector<RegionPoint> region_boundary(const CorrelationSet &set,
                                             const std::vector<arma::cx_mat> &Q,
                                             const std::vector<arma::vec> &mu_grid,
                                             const OptimizerSettings &settings,
                                             const FixedPointSettings &fp_settings,
                                             bool warm_start, bool freeze_phases)
    {
        if (mu_grid.empty())
            throw config_error("region_boundary: empty mu grid");
        const arma::uword M = set.M;
        std::vector<RegionPoint> points;
        std::optional<PhaseConfig> warm;

        for (const arma::vec &mu_raw : mu_grid)
        {
            RegionPoint pt;
            if (mu_raw.n_elem != M)
                throw config_error("region_boundary: mu dimension mismatch");
            if (mu_raw.min() < 0.0 || !(arma::accu(mu_raw) > 0.0))
                throw config_error("region_boundary: mu must be non-negative and non-null");
            pt.mu = mu_raw / arma::accu(mu_raw);
            pt.order = priority_order(pt.mu);

            const CorrelationSet view = set.permuted_users(pt.order);
            std::vector<arma::cx_mat> Qv(M);
            arma::vec mu_sorted(M);
            for (arma::uword j = 0; j < M; ++j)
            {
                Qv[j] = Q[pt.order(j)];
                mu_sorted(j) = pt.mu(pt.order(j));
            }

            try
            {
                if (freeze_phases)
                    pt.phases = PhaseConfig::identity(set.K, set.Ns);
                else
                {
                    OptimizeResult opt = weighted_objective_phases(view, Qv, mu_sorted, settings,
                                                                   fp_settings, warm);
                    pt.phases = std::move(opt.phases);
                    if (warm_start)
                        warm = pt.phases;
                }

                // nested-subset MIs at the chosen phases, lowest priority decoded first
                const SigmaSpectra spectra = sigma_spectra(view, pt.phases);
                pt.subset_mis.set_size(M);
                arma::vec rates_sorted(M);
                double prev = 0.0;
                Subset s;
                for (arma::uword l = 0; l < M; ++l)
                {
                    s.push_back(l);
                    const FixedPointState st = solve_fixed_point(view, spectra, Qv, s, fp_settings);
                    pt.subset_mis(l) = ergodic_mi(view, spectra, Qv, s, st);
                    rates_sorted(l) = static_cast<double>(set.Nt) * (pt.subset_mis(l) - prev);
                    prev = pt.subset_mis(l);
                }
                pt.rates.set_size(M);
                for (arma::uword j = 0; j < M; ++j)
                    pt.rates(pt.order(j)) = rates_sorted(j);
            }
            catch (const convergence_error &e)
            {
                pt.ok = false;
                pt.note = e.what();
            }
            points.push_back(std::move(pt));
        }
        return points;
    }

    bool region_contains(const std::vector<RegionPoint> &points, const arma::vec &rate,
                         double tolerance)
    {
        if (points.empty())
            throw config_error("region_contains: no boundary points");
        const arma::uword M = points.front().rates.n_elem;
        if (rate.n_elem != M)
            throw config_error("region_contains: rate dimension mismatch");

        std::vector<const RegionPoint *> good;
        for (const auto &p : points)
            if (p.ok)
                good.push_back(&p);
        if (good.empty())
            return false;

        arma::vec target = rate - tolerance;
        bool nonpositive = true;
        for (arma::uword i = 0; i < M; ++i)
            nonpositive = nonpositive && target(i) <= 0.0;
        if (nonpositive)
            return true; // free disposal from any point

        arma::mat P(M, good.size());
        for (std::size_t j = 0; j < good.size(); ++j)
            P.col(j) = good[j]->rates;
        return lp_dominated(P, target);
    }

} // namespace rismac
