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

#ifndef rismac_geometry_H
#define rismac_geometry_H

#include <armadillo>

#include "rismac/common.hpp"

namespace rismac
{
    // Element positions of one node (antenna array or RIS), in meters.
    // Positions are stored as a 3 x n matrix, one column per element.
    struct ArrayGeometry
    {
        arma::mat positions;               // 3 x n
        arma::vec3 normal = {0.0, 0.0, 1.0}; // unit normal of the array plane (hemisphere mode)

        arma::uword n_elements() const { return positions.n_cols; }

        // Uniform linear array along the x-axis.
        static ArrayGeometry ula(arma::uword n, double spacing);

        // Square-ish planar grid in the x-y plane (normal +z), centered at the origin.
        // Element index is row-major: n = ix * ny + iy.
        static ArrayGeometry planar_grid(arma::uword nx, arma::uword ny, double spacing);
    };

    // Power-weighted direction distribution of the waves seen by one node:
    // Gaussian weight w(k) ~ exp(-|k - s0|^2 / (2 sigma^2 k0^2)) on the sphere
    // |k| = k0 = 2 pi / wavelength, mean direction s0 from the two angles.
    // Elevation is the polar angle measured from +z (the array normal for a grid).
    struct AngularSpectrum
    {
        double mean_azimuth = 0.0;   // rad
        double mean_elevation = 0.0; // rad, polar angle from +z
        double angle_spread = 0.0;   // sigma, rad, > 0
        double wavelength = 0.0;     // m, > 0
        bool hemisphere = false;     // integrate only over k . normal >= 0

        double k0() const { return 2.0 * arma::datum::pi / wavelength; }

        // Unit vector of the mean direction.
        arma::vec3 mean_direction() const;

        // Mean wave vector s0 = k0 * mean_direction.
        arma::vec3 mean_wave_vector() const;
    };

    // Spatial correlation matrix of the node: entry (a,b) is the normalized
    // spherical integral of w(k) exp(i k . (x_a - x_b)). Unit diagonal by
    // construction; Hermitian PSD up to quadrature rounding (projected if a
    // slightly negative eigenvalue appears, error if the violation is gross).
    arma::cx_mat correlation_matrix(const ArrayGeometry &geometry, const AngularSpectrum &spectrum);

    // Same integral on a fixed product rule (n_elevation Gauss-Legendre nodes in
    // the cap polar angle x n_azimuth uniform nodes). correlation_matrix refines
    // this rule until doubling changes no entry by more than 1e-8; tests use it
    // directly as a dense brute-force oracle.
    arma::cx_mat correlation_matrix_fixed_rule(const ArrayGeometry &geometry,
                                               const AngularSpectrum &spectrum,
                                               arma::uword n_elevation, arma::uword n_azimuth);

} // namespace rismac

#endif
