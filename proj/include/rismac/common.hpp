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

#ifndef rismac_common_H
#define rismac_common_H

#include <armadillo>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rismac
{
    // Invalid or inconsistent scenario/parameter input. CLI exit code 1.
    class config_error : public std::runtime_error
    {
    public:
        explicit config_error(const std::string &msg) : std::runtime_error(msg) {}
    };

    // Iterative scheme failed to reach its tolerance. CLI exit code 2.
    class convergence_error : public std::runtime_error
    {
    public:
        convergence_error(const std::string &msg, double last_residual)
            : std::runtime_error(msg), residual(last_residual) {}
        double residual;
    };

    // Numerical-domain failure (indefinite log det argument, det <= 0, ...). CLI exit code 2.
    class numerical_error : public std::runtime_error
    {
    public:
        explicit numerical_error(const std::string &msg) : std::runtime_error(msg) {}
    };

    // splitmix64 mixing, used to derive independent per-draw seeds.
    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    inline std::uint64_t draw_seed(std::uint64_t base, std::uint64_t index)
    {
        return splitmix64(base + 0x9E3779B97F4A7C15ULL * (index + 1));
    }

    // Standard circularly-symmetric complex Gaussian, CN(0,1), via Box-Muller.
    // Hand-rolled so realizations are identical across standard libraries.
    inline std::complex<double> complex_gaussian(std::mt19937_64 &gen)
    {
        double u1 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        if (u1 <= 0.0)
            u1 = 0x1.0p-53;
        const double r = std::sqrt(-std::log(u1));
        return {r * std::cos(2.0 * arma::datum::pi * u2), r * std::sin(2.0 * arma::datum::pi * u2)};
    }

    // Deterministic pairwise (binary-tree) summation, independent of thread count.
    inline double pairwise_sum(const double *x, std::size_t n)
    {
        if (n == 0)
            return 0.0;
        if (n <= 8)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += x[i];
            return s;
        }
        const std::size_t half = n / 2;
        return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
    }

    inline double pairwise_sum(const std::vector<double> &x)
    {
        return pairwise_sum(x.data(), x.size());
    }

    // Runs fn(i) for i in [0, n) on up to n_threads workers. Tasks must write
    // to disjoint, index-keyed storage; iteration order carries no state.
    template <typename Fn>
    void parallel_for(std::size_t n, unsigned n_threads, Fn &&fn)
    {
        if (n_threads == 0)
            n_threads = std::max(1u, std::thread::hardware_concurrency());
        if (n_threads <= 1 || n < 2)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::vector<std::thread> pool;
        std::size_t chunk = (n + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t)
        {
            std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
            if (lo >= hi)
                break;
            pool.emplace_back([lo, hi, &fn]() {
                for (std::size_t i = lo; i < hi; ++i)
                    fn(i);
            });
        }
        for (auto &th : pool)
            th.join();
    }

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

    // Set of active transmitter indices (0-based, sorted, unique).
    using Subset = std::vector<arma::uword>;

    inline Subset all_users(arma::uword M)
    {
        Subset s(M);
        for (arma::uword m = 0; m < M; ++m)
            s[m] = m;
        return s;
    }

} // namespace rismac

#endif
