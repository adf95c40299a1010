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

#include "rismac/correlation.hpp"

namespace rismac
{

    arma::cx_mat MatrixFactor::full() const
    {
        if (identity)
            return arma::cx_mat(n, n, arma::fill::eye);
        return U * arma::diagmat(arma::conv_to<arma::cx_vec>::from(d)) * U.t();
    }

    arma::cx_mat MatrixFactor::sqrt_full() const
    {
        if (identity)
            return arma::cx_mat(n, n, arma::fill::eye);
        return U * arma::diagmat(arma::conv_to<arma::cx_vec>::from(arma::sqrt(d))) * U.t();
    }

    MatrixFactor MatrixFactor::make_identity(arma::uword n)
    {
        MatrixFactor f;
        f.n = n;
        f.identity = true;
        return f;
    }

    MatrixFactor MatrixFactor::make(const arma::cx_mat &A)
    {
        MatrixFactor f;
        f.n = A.n_rows;
        if (arma::norm(A - arma::cx_mat(f.n, f.n, arma::fill::eye), "fro") <
            1e-13 * static_cast<double>(f.n))
        {
            f.identity = true;
            return f;
        }
        arma::vec ev;
        arma::cx_mat V;
        if (!arma::eig_sym(ev, V, A))
            throw numerical_error("MatrixFactor: eigendecomposition failed");
        const double lmax = std::max(ev.max(), 0.0);
        // Negative eigenvalues are quadrature noise; clip at zero (PSD square root).
        std::vector<arma::uword> keep;
        for (arma::uword i = 0; i < ev.n_elem; ++i)
            if (ev(i) > 1e-12 * std::max(lmax, 1e-300))
                keep.push_back(i);
        if (keep.empty())
        {
            // Zero matrix: keep rank 0; callers treat it as a dead link.
            f.d.set_size(0);
            f.U.set_size(f.n, 0);
            return f;
        }
        f.d.set_size(keep.size());
        f.U.set_size(f.n, keep.size());
        // eig_sym sorts ascending; store descending with a deterministic phase
        // convention (largest-magnitude component real positive).
        for (std::size_t j = 0; j < keep.size(); ++j)
        {
            const arma::uword src = keep[keep.size() - 1 - j];
            f.d(j) = ev(src);
            arma::cx_vec u = V.col(src);
            arma::uword imax = arma::abs(u).index_max();
            std::complex<double> ph = u(imax);
            ph /= std::abs(ph);
            f.U.col(j) = u / ph;
        }
        return f;
    }

    namespace
    {
        void check_square(const arma::cx_mat &A, arma::uword n, const char *name)
        {
            if (A.n_rows != n || A.n_cols != n)
                throw config_error(std::string("CorrelationSet: ") + name +
                                   " has inconsistent dimensions");
        }

        void hermitize(arma::cx_mat &A, const char *name)
        {
            const double rel = arma::norm(A - A.t(), "fro") / std::max(arma::norm(A, "fro"), 1e-300);
            if (rel > 1e-12)
                throw config_error(std::string("CorrelationSet: ") + name + " is not Hermitian");
            A = 0.5 * (A + A.t());
        }

        void rescale_trace(arma::cx_mat &A, double target, const char *name)
        {
            const double tr = arma::trace(A).real();
            if (!(tr > 0.0))
                throw config_error(std::string("CorrelationSet: ") + name +
                                   " has non-positive trace");
            A *= target / tr;
        }
    } // namespace

    void CorrelationSet::finalize()
    {
        if (R_d.size() != M || T_d.size() != M || R.size() != K || S_r.size() != K ||
            S_t.size() != K * M || T.size() != K * M || gamma_d.n_elem != M)
            throw config_error("CorrelationSet: matrix list sizes do not match counts");

        auto fix = [&](std::vector<arma::cx_mat> &mats, arma::uword n, double target, const char *name) {
            for (auto &A : mats)
            {
                check_square(A, n, name);
                hermitize(A, name);
                rescale_trace(A, target, name);
            }
        };
        fix(R_d, Nr, static_cast<double>(Nr), "R_dm");
        fix(T_d, Nt, static_cast<double>(Nt), "T_dm");
        fix(R, Nr, static_cast<double>(Nr), "R_k");
        fix(S_r, Ns, static_cast<double>(Ns), "S_rk");
        fix(S_t, Ns, static_cast<double>(Ns), "S_tkm");
        fix(T, Nt, static_cast<double>(Nt), "T_km");

        auto fac = std::make_shared<CorrelationFactors>();
        auto build = [](const std::vector<arma::cx_mat> &mats) {
            std::vector<MatrixFactor> out;
            out.reserve(mats.size());
            for (const auto &A : mats)
                out.push_back(MatrixFactor::make(A));
            return out;
        };
        fac->R_d = build(R_d);
        fac->T_d = build(T_d);
        fac->R = build(R);
        fac->S_r = build(S_r);
        fac->S_t = build(S_t);
        fac->T = build(T);
        factors_ = std::move(fac);
    }

    const CorrelationFactors &CorrelationSet::factors() const
    {
        if (!factors_)
            throw config_error("CorrelationSet: finalize() has not been called");
        return *factors_;
    }

    CorrelationSet CorrelationSet::permuted_users(const arma::uvec &perm) const
    {
        if (perm.n_elem != M)
            throw config_error("permuted_users: permutation must have M entries");
        if (!factors_)
            throw config_error("permuted_users: finalize() has not been called");
        CorrelationSet out;
        out.M = M;
        out.K = K;
        out.Nt = Nt;
        out.Nr = Nr;
        out.Ns = Ns;
        out.rho = rho;
        out.R = R;
        out.S_r = S_r;
        out.gamma_d.set_size(M);
        out.R_d.resize(M);
        out.T_d.resize(M);
        out.S_t.resize(K * M);
        out.T.resize(K * M);
        auto fac = std::make_shared<CorrelationFactors>(*factors_);
        for (arma::uword j = 0; j < M; ++j)
        {
            const arma::uword src = perm(j);
            if (src >= M)
                throw config_error("permuted_users: index out of range");
            out.gamma_d(j) = gamma_d(src);
            out.R_d[j] = R_d[src];
            out.T_d[j] = T_d[src];
            fac->R_d[j] = factors_->R_d[src];
            fac->T_d[j] = factors_->T_d[src];
            for (arma::uword k = 0; k < K; ++k)
            {
                out.S_t[out.km(k, j)] = S_t[km(k, src)];
                out.T[out.km(k, j)] = T[km(k, src)];
                fac->S_t[out.km(k, j)] = factors_->S_t[km(k, src)];
                fac->T[out.km(k, j)] = factors_->T[km(k, src)];
            }
        }
        out.factors_ = std::move(fac);
        return out;
    }

    CorrelationSet identity_correlation_set(arma::uword M, arma::uword K, arma::uword Nt,
                                            arma::uword Nr, arma::uword Ns, double rho,
                                            double gamma)
    {
        CorrelationSet set;
        set.M = M;
        set.K = K;
        set.Nt = Nt;
        set.Nr = Nr;
        set.Ns = Ns;
        set.rho = rho;
        set.gamma_d = arma::vec(M, arma::fill::value(gamma));
        auto eye = [](arma::uword n) { return arma::cx_mat(n, n, arma::fill::eye); };
        set.R_d.assign(M, eye(Nr));
        set.T_d.assign(M, eye(Nt));
        set.R.assign(K, eye(Nr));
        set.S_r.assign(K, eye(Ns));
        set.S_t.assign(K * M, eye(Ns));
        set.T.assign(K * M, eye(Nt));
        set.finalize();
        return set;
    }

    ArrayGeometry ris_geometry(const ScenarioConfig &config)
    {
        if (config.ris_nx * config.ris_ny != config.Ns)
            throw config_error("scenario: ris grid nx*ny must equal Ns");
        return ArrayGeometry::planar_grid(config.ris_nx, config.ris_ny, config.ris_spacing);
    }

    AngularSpectrum link_spectrum(const ScenarioConfig &config, const LinkSpec &link,
                                  arma::uword k, std::size_t m)
    {
        const double mirror =
            (k < config.ris_mirror.size() && config.ris_mirror[k]) ? -1.0 : 1.0;
        AngularSpectrum sp;
        sp.wavelength = config.wavelength;
        sp.angle_spread = link.sigma_deg * arma::datum::pi / 180.0;
        sp.mean_elevation = link.theta_deg * arma::datum::pi / 180.0;
        sp.mean_azimuth = mirror * link.phi_for(m) * arma::datum::pi / 180.0;
        sp.hemisphere = link.hemisphere;
        return sp;
    }

    CorrelationSet build_correlation_set(const ScenarioConfig &config)
    {
        config.validate();
        CorrelationSet set;
        set.M = config.M;
        set.K = config.K;
        set.Nt = config.Nt;
        set.Nr = config.Nr;
        set.Ns = config.Ns;
        set.rho = config.rho_linear();
        set.gamma_d = arma::vec(config.M, arma::fill::value(config.gamma_linear()));

        const ArrayGeometry ris = (config.K > 0) ? ris_geometry(config) : ArrayGeometry{};
        const ArrayGeometry tx =
            ArrayGeometry::ula(config.Nt, config.tx_spacing_factor * config.wavelength);
        const ArrayGeometry rx =
            ArrayGeometry::ula(config.Nr, config.rx_spacing_factor * config.wavelength);

        auto eye = [](arma::uword n) { return arma::cx_mat(n, n, arma::fill::eye); };
        auto computed = [](const LinkSpec &l) { return l.mode == LinkSpec::Mode::computed; };

        set.R_d.assign(config.M, eye(config.Nr));
        set.T_d.assign(config.M, eye(config.Nt));
        set.R.assign(config.K, eye(config.Nr));
        set.S_r.assign(config.K, eye(config.Ns));
        set.S_t.assign(config.K * config.M, eye(config.Ns));
        set.T.assign(config.K * config.M, eye(config.Nt));

        for (arma::uword m = 0; m < config.M; ++m)
        {
            if (computed(config.rx_corr))
                set.R_d[m] = correlation_matrix(rx, link_spectrum(config, config.rx_corr, config.K, m));
            if (computed(config.tx_corr))
                set.T_d[m] = correlation_matrix(tx, link_spectrum(config, config.tx_corr, config.K, m));
        }
        for (arma::uword k = 0; k < config.K; ++k)
        {
            if (computed(config.rx_corr))
                set.R[k] = correlation_matrix(rx, link_spectrum(config, config.rx_corr, k, 0));
            if (computed(config.ris_rx))
                set.S_r[k] = correlation_matrix(ris, link_spectrum(config, config.ris_rx, k, 0));
            for (arma::uword m = 0; m < config.M; ++m)
            {
                // Identical RISs see identical spectra up to the mirror flag, so
                // equal (sigma, theta, phi) tuples could be cached here; builds are
                // rare enough that the map in correlation_matrix already suffices.
                if (computed(config.tx_ris))
                    set.S_t[set.km(k, m)] =
                        correlation_matrix(ris, link_spectrum(config, config.tx_ris, k, m));
                if (computed(config.tx_corr))
                    set.T[set.km(k, m)] =
                        correlation_matrix(tx, link_spectrum(config, config.tx_corr, k, m));
            }
        }
        set.finalize();
        return set;
    }

} // namespace rismac
