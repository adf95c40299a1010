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

#ifndef rismac_region_H
#define rismac_region_H

#include <string>
#include <vector>

#include <armadillo>

#include "rismac/phases.hpp"

namespace rismac
{
    // One boundary point of the ergodic capacity region: the rate multiplet of
    // the successive-decoding corner matching the priority order of mu, the
    // phases that produced it, and the nested-subset MIs behind the telescoping.
    struct RegionPoint
    {
        arma::vec mu;         // normalized priorities, original user order
        arma::vec rates;      // [M] nats/channel use, original user order
        PhaseConfig phases;
        arma::uvec order;     // decode priorities: order(0) = highest-priority user
        arma::vec subset_mis; // C({order(0..l)}) for l = 0..M-1 (per TX antenna)
        bool ok = true;
        std::string note;
    };

    // Sweeps the priority grid: per mu, users are stably pre-sorted by priority,
    // the phases are optimized for the weighted nested functional (unless
    // frozen at identity), and the corner rates R_(l) = Nt (C_l - C_{l-1}) are
    // extracted with the lowest priority decoded first. Points whose optimizer
    // fails are returned with ok = false.
    std::vector<RegionPoint> region_boundary(const CorrelationSet &correlations,
                                             const std::vector<arma::cx_mat> &Q,
                                             const std::vector<arma::vec> &mu_grid,
                                             const OptimizerSettings &settings,
                                             const FixedPointSettings &fp_settings = {},
                                             bool warm_start = true,
                                             bool freeze_phases = false);

    // Uniform M = 2 grid mu_1 = 0, 1/(n-1), ..., 1 with mu_2 = 1 - mu_1.
    std::vector<arma::vec> mu_grid_two_users(arma::uword n_points);

    // True when the rate vector is dominated by the convex hull (with free
    // disposal) of the boundary points; exact small LP feasibility.
    bool region_contains(const std::vector<RegionPoint> &points, const arma::vec &rate,
                         double tolerance = 1e-9);

} // namespace rismac

#endif
