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

#include "rismac/geometry.hpp"

#include <map>
#include <array>

namespace rismac
{

    ArrayGeometry ArrayGeometry::ula(arma::uword n, double spacing)
    {
        ArrayGeometry g;
        g.positions.zeros(3, n);
        for (arma::uword i = 0; i < n; ++i)
            g.positions(0, i) = static_cast<double>(i) * spacing;
        return g;
    }

    ArrayGeometry ArrayGeometry::planar_grid(arma::uword nx, arma::uword ny, double spacing)
    {
        ArrayGeometry g;
        g.positions.zeros(3, nx * ny);
        const double cx = 0.5 * static_cast<double>(nx - 1);
        const double cy = 0.5 * static_cast<double>(ny - 1);
        for (arma::uword ix = 0; ix < nx; ++ix)
            for (arma::uword iy = 0; iy < ny; ++iy)
            {
                const arma::uword n = ix * ny + iy;
                g.positions(0, n) = (static_cast<double>(ix) - cx) * spacing;
                g.positions(1, n) = (static_cast<double>(iy) - cy) * spacing;
            }
        return g;
    }

    arma::vec3 AngularSpectrum::mean_direction() const
    {
        const double st = std::sin(mean_elevation), ct = std::cos(mean_elevation);
        return {st * std::cos(mean_azimuth), st * std::sin(mean_azimuth), ct};
    }

    arma::vec3 AngularSpectrum::mean_wave_vector() const
    {
        return k0() * mean_direction();
    }

    namespace
    {
        void validate(const ArrayGeometry &geometry, const AngularSpectrum &spectrum)
        {
            if (geometry.n_elements() < 1)
                throw config_error("correlation_matrix: geometry has no elements");
            if (!(spectrum.angle_spread > 0.0))
                throw config_error("correlation_matrix: angle_spread must be > 0");
            if (!(spectrum.wavelength > 0.0))
                throw config_error("correlation_matrix: wavelength must be > 0");
        }

        // Rotation taking +z to the given unit vector.
        arma::mat33 rotation_z_to(const arma::vec3 &s)
        {
            const arma::vec3 z = {0.0, 0.0, 1.0};
            arma::vec3 v = arma::cross(z, s);
            const double c = arma::dot(z, s);
            const double s2 = arma::dot(v, v);
            arma::mat33 R(arma::fill::eye);
            if (s2 < 1e-30)
            {
                if (c < 0.0)
                    R(1, 1) = R(2, 2) = -1.0; // antipodal: rotate pi about x
                return R;
            }
            arma::mat33 K(arma::fill::zeros);
            K(0, 1) = -v(2); K(0, 2) = v(1);
            K(1, 0) = v(2);  K(1, 2) = -v(0);
            K(2, 0) = -v(1); K(2, 1) = v(0);
            R += K + K * K * ((1.0 - c) / s2);
            return R;
        }

        // Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
        void gauss_legendre(arma::uword n, arma::vec &x, arma::vec &w)
        {
            x.set_size(n);
            w.set_size(n);
            const arma::uword m = (n + 1) / 2;
            for (arma::uword i = 0; i < m; ++i)
            {
                double z = std::cos(arma::datum::pi * (static_cast<double>(i) + 0.75) /
                                    (static_cast<double>(n) + 0.5));
                double pp = 0.0;
                for (int it = 0; it < 100; ++it)
                {
                    double p1 = 1.0, p2 = 0.0;
                    for (arma::uword j = 0; j < n; ++j)
                    {
                        const double p3 = p2;
                        p2 = p1;
                        const double jd = static_cast<double>(j);
                        p1 = ((2.0 * jd + 1.0) * z * p2 - jd * p3) / (jd + 1.0);
                    }
                    pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
                    const double z1 = z;
                    z = z1 - p1 / pp;
                    if (std::abs(z - z1) < 1e-15)
                        break;
                }
                x(i) = -z;
                x(n - 1 - i) = z;
                w(i) = 2.0 / ((1.0 - z * z) * pp * pp);
                w(n - 1 - i) = w(i);
            }
        }

        struct QuadratureGrid
        {
            arma::mat dirs;  // 3 x Q unit direction vectors
            arma::vec wts;   // Q weights, normalized to sum 1
        };

        // Product rule over the spherical cap of half-angle `cap` around the mean
        // direction: Gauss-Legendre in u = cos(theta'), and per elevation ring
        // either uniform periodic azimuth nodes or, in hemisphere mode, Gauss
        // nodes on the exact admissible arc k . normal >= 0 (keeping the
        // integrand smooth on its domain so node doubling converges). The
        // Gaussian weight is exp(-(1 - cos theta')/sigma^2) exactly in the
        // rotated frame; normalization over the same grid makes the diagonal 1.
        QuadratureGrid build_grid(const AngularSpectrum &spectrum, const arma::vec3 &normal,
                                  arma::uword n_el, arma::uword n_az)
        {
            const double sigma = spectrum.angle_spread;
            const double cap = std::min(arma::datum::pi, 12.0 * sigma);
            const arma::mat33 R = rotation_z_to(spectrum.mean_direction());
            // normal expressed in the rotated frame: (R local) . normal = local . nr
            const arma::vec3 nr = R.t() * normal;

            arma::vec gl_x, gl_w;
            gauss_legendre(n_el, gl_x, gl_w);
            const double u_lo = std::cos(cap), u_hi = 1.0;
            const double half = 0.5 * (u_hi - u_lo), mid = 0.5 * (u_hi + u_lo);

            arma::vec arc_x, arc_w;
            if (spectrum.hemisphere)
                gauss_legendre(n_az, arc_x, arc_w);

            QuadratureGrid grid;
            grid.dirs.set_size(3, n_el * n_az);
            grid.wts.set_size(n_el * n_az);

            arma::uword q = 0;
            double total = 0.0;
            for (arma::uword i = 0; i < n_el; ++i)
            {
                const double u = mid + half * gl_x(i);
                const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
                const double wg = std::exp(-(1.0 - u) / (sigma * sigma)) * gl_w(i) * half;

                // admissible azimuth range on this ring
                bool full_ring = true, empty_ring = false;
                double psi = 0.0, alpha = arma::datum::pi;
                if (spectrum.hemisphere)
                {
                    const double A = st * std::hypot(nr(0), nr(1));
                    const double d = -nr(2) * u;
                    if (A < 1e-15)
                    {
                        empty_ring = d > 0.0;
                    }
                    else
                    {
                        const double t0 = d / A;
                        if (t0 >= 1.0)
                            empty_ring = true;
                        else if (t0 > -1.0)
                        {
                            full_ring = false;
                            psi = std::atan2(nr(1), nr(0));
                            alpha = std::acos(t0);
                        }
                    }
                }

                for (arma::uword j = 0; j < n_az; ++j)
                {
                    double phi, w;
                    if (empty_ring)
                    {
                        phi = 0.0;
                        w = 0.0;
                    }
                    else if (full_ring)
                    {
                        phi = 2.0 * arma::datum::pi * static_cast<double>(j) /
                              static_cast<double>(n_az);
                        w = wg * 2.0 * arma::datum::pi / static_cast<double>(n_az);
                    }
                    else
                    {
                        phi = psi + alpha * arc_x(j);
                        w = wg * alpha * arc_w(j);
                    }
                    const arma::vec3 local = {st * std::cos(phi), st * std::sin(phi), u};
                    grid.dirs.col(q) = R * local;
                    grid.wts(q) = w;
                    total += w;
                    ++q;
                }
            }
            if (!(total > 0.0))
                throw numerical_error("correlation quadrature: weight mass vanished "
                                      "(hemisphere cut removed the whole spectrum?)");
            grid.wts /= total;
            return grid;
        }

        // Sum of w_q exp(i k0 dir_q . delta) over the grid.
        std::complex<double> kernel(const QuadratureGrid &grid, double k0, const arma::vec3 &delta)
        {
            const arma::uword Q = grid.wts.n_elem;
            std::complex<double> acc(0.0, 0.0);
            for (arma::uword q = 0; q < Q; ++q)
            {
                const double w = grid.wts(q);
                if (w == 0.0)
                    continue;
                const double phase = k0 * (grid.dirs(0, q) * delta(0) +
                                           grid.dirs(1, q) * delta(1) +
                                           grid.dirs(2, q) * delta(2));
                acc += w * std::complex<double>(std::cos(phase), std::sin(phase));
            }
            return acc;
        }

        arma::cx_mat evaluate(const ArrayGeometry &geometry, const AngularSpectrum &spectrum,
                              const QuadratureGrid &grid)
        {
            const arma::uword n = geometry.n_elements();
            const double k0 = spectrum.k0();

            // Regular lattices repeat the same element separation many times; key
            // the kernel on the quantized separation so each one is integrated once.
            std::map<std::array<long long, 3>, std::complex<double>> cache;
            auto key_of = [](const arma::vec3 &d) {
                return std::array<long long, 3>{
                    static_cast<long long>(std::llround(d(0) * 1e9)),
                    static_cast<long long>(std::llround(d(1) * 1e9)),
                    static_cast<long long>(std::llround(d(2) * 1e9))};
            };

            arma::cx_mat S(n, n);
            for (arma::uword a = 0; a < n; ++a)
            {
                S(a, a) = 1.0;
                for (arma::uword b = 0; b < a; ++b)
                {
                    const arma::vec3 delta = geometry.positions.col(a) - geometry.positions.col(b);
                    const auto key = key_of(delta);
                    auto it = cache.find(key);
                    std::complex<double> v;
                    if (it != cache.end())
                        v = it->second;
                    else
                    {
                        v = kernel(grid, k0, delta);
                        cache.emplace(key, v);
                    }
                    S(a, b) = v;
                    S(b, a) = std::conj(v);
                }
            }
            return S;
        }

        // PSD guard: tolerate eigenvalues down to -1e-10 * lambda_max, project to the
        // cone below that, reject gross violations as quadrature failures.
        arma::cx_mat psd_guard(arma::cx_mat S)
        {
            arma::vec ev;
            arma::cx_mat V;
            if (!arma::eig_sym(ev, V, S))
                throw numerical_error("correlation_matrix: eigendecomposition failed");
            const double lmax = std::max(ev.max(), 0.0);
            const double lmin = ev.min();
            if (lmin >= -1e-10 * std::max(lmax, 1.0))
                return S;
            if (lmin < -1e-6 * std::max(lmax, 1.0))
                throw numerical_error("correlation_matrix: matrix is indefinite beyond "
                                      "quadrature tolerance (min eig " + std::to_string(lmin) + ")");
            ev.transform([](double x) { return std::max(x, 0.0); });
            return V * arma::diagmat(arma::cx_vec(ev, arma::vec(ev.n_elem, arma::fill::zeros))) * V.t();
        }

    } // namespace

    arma::cx_mat correlation_matrix_fixed_rule(const ArrayGeometry &geometry,
                                               const AngularSpectrum &spectrum,
                                               arma::uword n_elevation, arma::uword n_azimuth)
    {
        validate(geometry, spectrum);
        const QuadratureGrid grid = build_grid(spectrum, geometry.normal, n_elevation, n_azimuth);
        return evaluate(geometry, spectrum, grid);
    }

    arma::cx_mat correlation_matrix(const ArrayGeometry &geometry, const AngularSpectrum &spectrum)
    {
        validate(geometry, spectrum);
        const arma::uword n = geometry.n_elements();
        if (n == 1)
            return arma::cx_mat(1, 1, arma::fill::eye);

        // Initial node counts sized to the oscillation k0 * aperture across the cap.
        double dmax = 0.0;
        for (arma::uword a = 0; a < n; ++a)
            for (arma::uword b = 0; b < a; ++b)
                dmax = std::max(dmax, arma::norm(geometry.positions.col(a) - geometry.positions.col(b)));
        const double cap = std::min(arma::datum::pi, 12.0 * spectrum.angle_spread);
        const double budget = spectrum.k0() * dmax * std::min(1.0, cap);
        arma::uword n_el = std::clamp<arma::uword>(16 + static_cast<arma::uword>(budget / 2.0), 16, 512);
        arma::uword n_az = 2 * n_el;

        arma::cx_mat S = evaluate(geometry, spectrum, build_grid(spectrum, geometry.normal, n_el, n_az));
        for (int level = 0; level < 7; ++level)
        {
            const arma::cx_mat S2 =
                evaluate(geometry, spectrum, build_grid(spectrum, geometry.normal, 2 * n_el, 2 * n_az));
            const double change = arma::abs(S2 - S).max();
            S = S2;
            n_el *= 2;
            n_az *= 2;
            if (change < 1e-8)
                return psd_guard(S);
        }
        throw numerical_error("correlation_matrix: quadrature did not converge to 1e-8 "
                              "under node doubling");
    }

} // namespace rismac
