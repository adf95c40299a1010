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

#ifndef rismac_correlation_H
#define rismac_correlation_H

#include <memory>
#include <vector>

#include <armadillo>

#include "rismac/common.hpp"
#include "rismac/geometry.hpp"
#include "rismac/scenario.hpp"

namespace rismac
{
    // Truncated Hermitian eigendecomposition of one correlation matrix,
    // A ~= U diag(d) U^dagger with d > 0 descending. Identity matrices keep a
    // flag instead of factors so the hot paths can skip the algebra entirely.
    struct MatrixFactor
    {
        arma::uword n = 0;
        bool identity = false;
        arma::vec d;      // kept eigenvalues, descending
        arma::cx_mat U;   // n x rank, orthonormal columns

        arma::uword rank() const { return identity ? n : d.n_elem; }
        arma::cx_mat full() const;       // reconstruct A
        arma::cx_mat sqrt_full() const;  // reconstruct A^{1/2}

        static MatrixFactor make(const arma::cx_mat &A);
        static MatrixFactor make_identity(arma::uword n);
    };

    struct CorrelationFactors
    {
        std::vector<MatrixFactor> R_d, T_d; // [M]
        std::vector<MatrixFactor> R, S_r;   // [K]
        std::vector<MatrixFactor> S_t, T;   // [K*M]
    };

    // All Kronecker-model correlation matrices of one scenario, with the trace
    // normalizations Tr T_km = Tr T_dm = Nt, Tr R_k = Tr R_dm = Nr,
    // Tr S_rk = Tr S_tkm = Ns, plus the link SNRs.
    struct CorrelationSet
    {
        arma::uword M = 0, K = 0, Nt = 0, Nr = 0, Ns = 0;

        std::vector<arma::cx_mat> R_d, T_d; // [M]  Nr x Nr, Nt x Nt
        std::vector<arma::cx_mat> R, S_r;   // [K]  Nr x Nr, Ns x Ns
        std::vector<arma::cx_mat> S_t, T;   // [K*M] Ns x Ns, Nt x Nt (index km())
        arma::vec gamma_d;                  // [M] linear direct/RIS SNR ratio
        double rho = 1.0;                   // linear per-TX SNR

        arma::uword km(arma::uword k, arma::uword m) const { return k * M + m; }

        // Validates dimensions/Hermiticity, rescales every trace to its exact
        // target, and (re)builds the cached eigen-factors. Must be called after
        // any manual edit of the matrices; build_correlation_set calls it.
        void finalize();

        const CorrelationFactors &factors() const;

        bool finalized() const { return factors_ != nullptr; }

        // User-permuted view, perm(j) = original index of the user in slot j.
        // Matrices and cached factors are shuffled; nothing is re-factorized.
        CorrelationSet permuted_users(const arma::uvec &perm) const;

    private:
        std::shared_ptr<const CorrelationFactors> factors_;
    };

    // Assembles the full set from a scenario: computed links go through the
    // spherical-quadrature correlation_matrix, uncorrelated ones are identities.
    CorrelationSet build_correlation_set(const ScenarioConfig &config);

    // Identity-correlation set (all links uncorrelated), mostly for tests.
    CorrelationSet identity_correlation_set(arma::uword M, arma::uword K, arma::uword Nt,
                                            arma::uword Nr, arma::uword Ns, double rho,
                                            double gamma = 0.0);

    // Geometry helpers shared with the rank-one spectra construction.
    ArrayGeometry ris_geometry(const ScenarioConfig &config);
    AngularSpectrum link_spectrum(const ScenarioConfig &config, const LinkSpec &link,
                                  arma::uword k, std::size_t m);

} // namespace rismac

#endif
