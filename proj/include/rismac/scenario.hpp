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

#ifndef rismac_scenario_H
#define rismac_scenario_H

#include <cstdint>
#include <string>
#include <vector>

#include "rismac/common.hpp"

namespace rismac
{
    // Per-link correlation description. "identity" means uncorrelated fading on
    // that side; "computed" builds the matrix from array geometry and the
    // angular spectrum below.
    struct LinkSpec
    {
        enum class Mode { identity, computed };
        Mode mode = Mode::identity;
        double sigma_deg = 0.0;          // angle spread
        double theta_deg = 0.0;          // mean elevation (polar angle from the array normal)
        std::vector<double> phi_deg;     // mean azimuth(s); one entry per TX where applicable
        bool hemisphere = false;         // integrate the weight over the front hemisphere only

        double phi_for(std::size_t m) const
        {
            if (phi_deg.empty())
                return 0.0;
            return phi_deg[std::min(m, phi_deg.size() - 1)];
        }
    };

    struct OptimizerSettings
    {
        enum class Mode { full, semi };
        enum class Quantization { none, one_bit, two_bit };
        Mode mode = Mode::full;
        Quantization quantization = Quantization::none;
        double step_size = 1.0;   // epsilon
        double tolerance = 1e-6;  // delta, composite residual
        arma::uword max_iter = 2000;
    };

    struct FixedPointSettings
    {
        enum class Init { zeros_forward, ones };
        double tolerance = 1e-10;     // relative equation residual
        arma::uword max_iter = 10000;
        double damping = 0.5;         // Picard mixing, halved on oscillation
        Init init = Init::zeros_forward;
    };

    struct McSettings
    {
        arma::uword n_draws = 10000;
        std::uint64_t seed = 1;
    };

    // Full experiment description; the JSON schema mirrors the field names.
    struct ScenarioConfig
    {
        int schema_version = 1;

        arma::uword M = 1, K = 1, Nt = 1, Nr = 1, Ns = 1;
        double wavelength = 0.12; // m

        double rho_dB = 10.0;
        bool gamma_zero = true;    // direct paths absent
        double gamma_d_dB = 0.0;   // used when gamma_zero is false

        arma::uword ris_nx = 1, ris_ny = 1;
        double ris_spacing = 0.06; // m
        std::vector<bool> ris_mirror;       // per RIS, negate link azimuths
        double tx_spacing_factor = 0.5;     // ULA spacing in wavelengths
        double rx_spacing_factor = 0.5;

        LinkSpec tx_ris;  // S_t,km (RIS side of the TX->RIS links)
        LinkSpec ris_rx;  // S_r,k  (RIS side of the RIS->RX links)
        LinkSpec tx_corr; // T_km and T_dm (TX arrays)
        LinkSpec rx_corr; // R_k and R_dm (RX array)

        OptimizerSettings optimizer;
        FixedPointSettings fixed_point;
        McSettings mc;

        std::vector<std::vector<double>> mu_grid; // explicit priority vectors, optional
        arma::uword mu_points = 11;               // auto grid size for M = 2
        std::vector<double> rate_grid;            // outage rates in nats, optional

        std::string output_dir = "out";
        unsigned threads = 0; // 0 = hardware concurrency

        double rho_linear() const { return db_to_linear(rho_dB); }
        double gamma_linear() const { return gamma_zero ? 0.0 : db_to_linear(gamma_d_dB); }

        // Throws config_error on inconsistent counts, spreads, or grids.
        void validate() const;
    };

    // JSON (comments allowed) from disk / text; serialization echoes dB fields
    // together with their linear conversions.
    ScenarioConfig load_scenario(const std::string &path);
    ScenarioConfig parse_scenario(const std::string &json_text);
    std::string serialize_scenario(const ScenarioConfig &config);

} // namespace rismac

#endif
