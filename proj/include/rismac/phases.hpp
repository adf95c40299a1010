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

#ifndef rismac_phases_H
#define rismac_phases_H

#include <optional>
#include <vector>

#include <armadillo>

#include "rismac/fixed_point.hpp"
#include "rismac/scenario.hpp"

namespace rismac
{
    // Vanishing-angle-spread surrogate of the RIS-side correlations: unit plane
    // waves u_km (incoming from TX m at RIS k) and v_k (outgoing to the RX),
    // entries of modulus 1/sqrt(Ns).
    struct RankOneSpectra
    {
        std::vector<arma::cx_vec> u;     // [K*M]
        std::vector<arma::cx_vec> v;     // [K]
        std::vector<arma::vec3> delta_q; // [K*M] wave-vector difference q_r - q_tm

        // Plane waves from the scenario's mean link directions (the Eq.-(20) form).
        static RankOneSpectra from_scenario(const ScenarioConfig &config);

        // Principal eigenvectors of S_tkm / S_rk, entrywise projected back to
        // modulus 1/sqrt(Ns) (phase-only) so the invariant holds at finite spread.
        static RankOneSpectra from_correlations(const CorrelationSet &correlations);
    };

    struct OptimizeTraceRow
    {
        arma::uword iteration = 0;
        double objective = 0.0; // running Nt * C (weighted sum for mu objectives)
        double residual = 0.0;  // composite phase + parameter residual
        double step_size = 0.0;
        bool accepted = true;
    };

    struct OptimizeResult
    {
        PhaseConfig phases;
        FixedPointState state; // converged at the returned phases, largest subset
        double objective = 0.0; // exact Nt * C (or weighted functional) at the result
        arma::uword iterations = 0;
        std::vector<OptimizeTraceRow> trace;
    };

    // Joint gradient-ascent optimization of all RIS phases for the sum MI of the
    // subset: interleaves the Eq.-(17) parameter updates with the phase steps
    // phi += eps * sum_m Im diag (I + t_1k r_2km S_tkm Phi^dagger S_rk Phi)^{-1},
    // starting from Phi = I and zero parameters. The step halves when the
    // running objective drops after the parameters settle; the better of the
    // final and best-seen phase configurations is returned under an exact
    // fixed-point re-solve.
    OptimizeResult optimize_full(const CorrelationSet &correlations,
                                 const std::vector<arma::cx_mat> &Q, const Subset &subset,
                                 const OptimizerSettings &settings,
                                 const FixedPointSettings &fp_settings = {},
                                 const std::optional<PhaseConfig> &initial_phases = std::nullopt,
                                 const std::vector<bool> &update_mask = {});

    // Rank-one surrogate ascent on the kappa functional with periodic exact
    // fixed-point refreshes, per the vanishing-angle-spread analysis.
    OptimizeResult optimize_semi(const CorrelationSet &correlations,
                                 const std::vector<arma::cx_mat> &Q, const Subset &subset,
                                 const OptimizerSettings &settings, const RankOneSpectra &spectra,
                                 const FixedPointSettings &fp_settings = {},
                                 const std::optional<PhaseConfig> &initial_phases = std::nullopt);

    // Nearest-codebook projection; 1-bit {0, pi}, 2-bit {pi/4, 3pi/4, 5pi/4, 7pi/4}.
    // Equidistant ties go to the smaller angle.
    PhaseConfig quantize_phases(const PhaseConfig &config, OptimizerSettings::Quantization level);

    // Maximizes the mu-weighted nested-subset functional
    // sum_l (mu_l - mu_{l+1}) Nt C_l over the phases; mu must be non-negative and
    // non-increasing (it is normalized to sum 1). Users are assumed pre-sorted.
    OptimizeResult weighted_objective_phases(const CorrelationSet &correlations,
                                             const std::vector<arma::cx_mat> &Q,
                                             const arma::vec &mu, const OptimizerSettings &settings,
                                             const FixedPointSettings &fp_settings = {},
                                             const std::optional<PhaseConfig> &initial_phases =
                                                 std::nullopt,
                                             const std::optional<RankOneSpectra> &spectra =
                                                 std::nullopt);

} // namespace rismac

#endif
