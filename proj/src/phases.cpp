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

#include "rismac/phases.hpp"

#include "rismac/correlation.hpp"

namespace rismac
{
    namespace
    {
        constexpr int kMaxHalvings = 30;

        struct ObjectiveTerm
        {
            Subset subset;
            double weight = 1.0;
        };

        std::vector<bool> full_mask(arma::uword K, const std::vector<bool> &mask)
        {
            if (mask.empty())
                return std::vector<bool>(K, true);
            if (mask.size() != K)
                throw config_error("optimizer: update mask must have K entries");
            return mask;
        }

        double phase_step_norm(const PhaseConfig &a, const PhaseConfig &b)
        {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.phases.size(); ++k)
                for (arma::uword n = 0; n < a.phases[k].n_elem; ++n)
                    acc += std::norm(std::polar(1.0, a.phases[k](n)) -
                                     std::polar(1.0, b.phases[k](n)));
            return std::sqrt(acc);
        }

        double param_change_sum(const FixedPointState &a, const FixedPointState &b)
        {
            return arma::accu(arma::abs(a.t_d - b.t_d)) + arma::accu(arma::abs(a.r_d - b.r_d)) +
                   arma::accu(arma::abs(a.t_1 - b.t_1)) + arma::accu(arma::abs(a.r_1 - b.r_1)) +
                   arma::accu(arma::abs(a.t_2 - b.t_2)) + arma::accu(arma::abs(a.r_2 - b.r_2));
        }

        arma::cx_vec to_cx(const arma::vec &d)
        {
            return arma::cx_vec(d, arma::vec(d.n_elem, arma::fill::zeros));
        }

        // Per-iteration per-(k,m) products shared by the Sigma spectrum, the
        // parameter traces, and the Woodbury form of diag (I + c A)^{-1} with
        // A = S_t Phi^dagger S_r Phi. When either side is an identity, Sigma does
        // not depend on Phi and the phase gradient vanishes identically, so only
        // the spectrum is kept.
        struct KmWork
        {
            bool phase_sensitive = false;
            arma::vec spectrum; // Sigma_km eigenvalues
            arma::cx_mat G;     // U_r^dagger Phi U_t          (rr x rt)
            arma::cx_mat P;     // G^dagger D_r U_r^dagger Phi (rt x Ns)
            arma::cx_mat GdG;   // G^dagger D_r G              (rt x rt)
        };

        KmWork build_km_work(const CorrelationSet &set, const MatrixFactor &fr,
                             const MatrixFactor &ft, const arma::cx_vec &phi)
        {
            KmWork w;
            if (fr.identity && ft.identity)
            {
                w.spectrum = arma::vec(set.Ns, arma::fill::ones); // Phi^dagger Phi = I
                return w;
            }
            if (fr.identity)
            {
                w.spectrum = ft.d;
                return w;
            }
            if (ft.identity)
            {
                w.spectrum = fr.d;
                return w;
            }
            w.phase_sensitive = true;
            const arma::cx_mat PhiUt = ft.U.each_col() % phi; // Phi U_t
            w.G = fr.U.t() * PhiUt;
            arma::cx_mat F = w.G;
            for (arma::uword i = 0; i < F.n_rows; ++i)
                for (arma::uword j = 0; j < F.n_cols; ++j)
                    F(i, j) *= std::sqrt(fr.d(i)) * std::sqrt(ft.d(j));
            w.spectrum = arma::square(arma::svd(F));

            arma::cx_mat H = fr.U.t(); // -> U_r^dagger Phi
            for (arma::uword n = 0; n < H.n_cols; ++n)
                H.col(n) *= phi(n);
            w.P = w.G.t() * (H.each_col() % to_cx(fr.d));
            w.GdG = w.G.t() * (w.G.each_col() % to_cx(fr.d));
            return w;
        }

        // Adds weight * Im diag B to grad, B = (I + c S_t Phi^dagger S_r Phi)^{-1}
        // = I - U_t Y (c D_t P) with Y = (I + c D_t GdG)^{-1}.
        void accumulate_gradient(const KmWork &w, const MatrixFactor &ft, double c,
                                 double weight, arma::vec &grad)
        {
            if (!w.phase_sensitive || c == 0.0 || weight == 0.0)
                return;
            arma::cx_mat core = c * (w.GdG.each_col() % to_cx(ft.d));
            core.diag() += 1.0;
            arma::cx_mat Y;
            if (!arma::inv(Y, core))
                throw numerical_error("optimizer: Woodbury core is singular");
            const arma::cx_mat M2 = Y * (c * (w.P.each_col() % to_cx(ft.d)));
            const arma::uword rt = ft.d.n_elem;
            for (arma::uword n = 0; n < grad.n_elem; ++n)
            {
                std::complex<double> acc(0.0, 0.0);
                for (arma::uword j = 0; j < rt; ++j)
                    acc += ft.U(n, j) * M2(j, n);
                grad(n) -= weight * std::imag(acc); // Im B_nn = -Im [(U_t Y Z)_nn]
            }
        }

        struct CoreResult
        {
            PhaseConfig phases;
            std::vector<FixedPointState> states;
            double objective = 0.0;
            arma::uword iterations = 0;
            std::vector<OptimizeTraceRow> trace;
        };

        double exact_objective(const CorrelationSet &set, const PhaseConfig &phases,
                               const std::vector<arma::cx_mat> &Q,
                               const std::vector<ObjectiveTerm> &terms,
                               const FixedPointSettings &fp, std::vector<FixedPointState> &states)
        {
            const SigmaSpectra spectra = sigma_spectra(set, phases);
            states.clear();
            double J = 0.0;
            for (const auto &term : terms)
            {
                FixedPointState st = solve_fixed_point(set, spectra, Q, term.subset, fp);
                J += term.weight * static_cast<double>(set.Nt) *
                     ergodic_mi(set, spectra, Q, term.subset, st);
                states.push_back(std::move(st));
            }
            return J;
        }

        // Joint ascent over a weighted list of nested-subset objectives: one
        // parameter sweep and one phase step per iteration, step halving (with
        // revert to the best-seen phases) once the parameters have settled.
        CoreResult optimize_core(const CorrelationSet &set, const std::vector<arma::cx_mat> &Q,
                                 const std::vector<ObjectiveTerm> &terms,
                                 const OptimizerSettings &settings,
                                 const FixedPointSettings &fp_settings,
                                 const std::optional<PhaseConfig> &initial_phases,
                                 const std::vector<bool> &mask_in)
        {
            const arma::uword K = set.K;
            const CorrelationFactors &fac = set.factors();
            const std::vector<bool> mask = full_mask(K, mask_in);

            PhaseConfig phases =
                initial_phases ? *initial_phases : PhaseConfig::identity(K, set.Ns);
            if (phases.phases.size() != K)
                throw config_error("optimizer: initial phases do not match RIS count");

            const std::size_t nterm = terms.size();
            std::vector<FixedPointState> states(nterm, FixedPointState::zeros(set.M, K));

            double eps = settings.step_size;
            int halvings = 0;
            double best_J = -arma::datum::inf;
            PhaseConfig best_phases = phases;
            double prev_param_res = arma::datum::inf;
            double param_alpha = 1.0; // Algorithm-1 direct updates unless they oscillate

            CoreResult result;
            arma::uword iterations = 0;
            for (arma::uword it = 1; it <= settings.max_iter; ++it)
            {
                iterations = it;
                const PhaseConfig phases_before = phases;
                const std::vector<FixedPointState> states_before = states;

                SigmaSpectra spectra(set.K * set.M);
                std::vector<std::vector<KmWork>> work(K);
                for (arma::uword k = 0; k < K; ++k)
                {
                    work[k].resize(set.M);
                    const arma::cx_vec phi = phases.coefficients(k);
                    for (arma::uword m = 0; m < set.M; ++m)
                    {
                        work[k][m] = build_km_work(set, fac.S_r[k], fac.S_t[set.km(k, m)], phi);
                        spectra[set.km(k, m)] = work[k][m].spectrum;
                    }
                }

                std::vector<arma::vec> grad(K);
                for (arma::uword k = 0; k < K; ++k)
                    grad[k].zeros(set.Ns);
                double J_run = 0.0, param_res = 0.0;
                for (std::size_t ti = 0; ti < nterm; ++ti)
                {
                    FixedPointState &x = states[ti];
                    const FixedPointState x_old = x;
                    fixed_point_sweep(set, spectra, Q, terms[ti].subset, x, param_alpha);
                    param_res = std::max(param_res, param_change_sum(x, x_old));
                    J_run += terms[ti].weight * static_cast<double>(set.Nt) *
                             ergodic_mi(set, spectra, Q, terms[ti].subset, x);
                    for (arma::uword m : terms[ti].subset)
                        for (arma::uword k = 0; k < K; ++k)
                            if (mask[k])
                                accumulate_gradient(work[k][m], fac.S_t[set.km(k, m)],
                                                    x.t_1(k) * x.r_2(k, m), terms[ti].weight,
                                                    grad[k]);
                }
                if (!std::isfinite(J_run))
                    throw numerical_error("optimizer: non-finite objective; reduce step_size");
                if (param_res > 2.0 * prev_param_res && it > 4)
                    param_alpha = std::max(0.25, 0.5 * param_alpha);

                const bool settled = prev_param_res < 1e-4;
                if (settled && J_run + 1e-12 < best_J && halvings < kMaxHalvings)
                {
                    phases = best_phases; // reject the last phase step
                    states = states_before;
                    eps *= 0.5;
                    ++halvings;
                    result.trace.push_back({it, J_run, 0.0, eps, false});
                    prev_param_res = param_res;
                    continue;
                }
                if (J_run > best_J)
                {
                    best_J = J_run;
                    best_phases = phases;
                }

                for (arma::uword k = 0; k < K; ++k)
                    if (mask[k])
                        phases.phases[k] += eps * grad[k];

                double residual = phase_step_norm(phases, phases_before);
                for (std::size_t ti = 0; ti < nterm; ++ti)
                    residual += param_change_sum(states[ti], states_before[ti]);
                result.trace.push_back({it, J_run, residual, eps, true});
                prev_param_res = param_res;
                if (residual < settings.tolerance)
                    break;
            }

            std::vector<FixedPointState> states_final, states_best;
            const double J_final = exact_objective(set, phases, Q, terms, fp_settings, states_final);
            double J_best_exact = J_final;
            const bool have_best = phase_step_norm(best_phases, phases) > 0.0;
            if (have_best)
                J_best_exact = exact_objective(set, best_phases, Q, terms, fp_settings, states_best);
            if (have_best && J_best_exact > J_final)
            {
                result.phases = std::move(best_phases);
                result.states = std::move(states_best);
                result.objective = J_best_exact;
            }
            else
            {
                result.phases = std::move(phases);
                result.states = std::move(states_final);
                result.objective = J_final;
            }
            result.iterations = iterations;
            return result;
        }

        // Rank-one surrogate ascent (vanishing-spread form): inner loop on the
        // kappa functional at frozen parameters, outer loop re-solving the exact
        // fixed point with the new phases until the true objective settles.
        CoreResult optimize_semi_terms(const CorrelationSet &set,
                                       const std::vector<arma::cx_mat> &Q,
                                       const std::vector<ObjectiveTerm> &terms,
                                       const OptimizerSettings &settings,
                                       const RankOneSpectra &spectra,
                                       const FixedPointSettings &fp_settings,
                                       const std::optional<PhaseConfig> &initial_phases)
        {
            const arma::uword K = set.K;
            const double Ns = static_cast<double>(set.Ns);
            if (spectra.v.size() != K || spectra.u.size() != K * set.M)
                throw config_error("optimize_semi: rank-one spectra do not match counts");

            PhaseConfig phases =
                initial_phases ? *initial_phases : PhaseConfig::identity(K, set.Ns);

            // c_kmn = conj(v_k(n)) u_km(n); kappa_km = sum_n c_kmn e^{i phi_kn}
            std::vector<arma::cx_vec> cvec(K * set.M);
            for (arma::uword k = 0; k < K; ++k)
                for (arma::uword m = 0; m < set.M; ++m)
                    cvec[set.km(k, m)] = arma::conj(spectra.v[k]) % spectra.u[set.km(k, m)];

            auto kappa = [&](arma::uword k, arma::uword m) {
                const arma::cx_vec &c = cvec[set.km(k, m)];
                std::complex<double> acc(0.0, 0.0);
                for (arma::uword n = 0; n < c.n_elem; ++n)
                    acc += c(n) * std::polar(1.0, phases.phases[k](n));
                return acc;
            };
            auto surrogate = [&](const std::vector<FixedPointState> &sts) {
                double D = 0.0;
                for (std::size_t ti = 0; ti < terms.size(); ++ti)
                    for (arma::uword m : terms[ti].subset)
                        for (arma::uword k = 0; k < K; ++k)
                        {
                            const double tr = sts[ti].t_1(k) * sts[ti].r_2(k, m);
                            D += terms[ti].weight * std::log1p(Ns * Ns * tr * std::norm(kappa(k, m)));
                        }
                return D;
            };

            CoreResult result;
            std::vector<FixedPointState> states;
            double J = exact_objective(set, phases, Q, terms, fp_settings, states);
            double best_J = J;
            PhaseConfig best_phases = phases;
            double eps = settings.step_size;
            int halvings = 0;
            arma::uword outer = 0;

            for (outer = 1; outer <= 50; ++outer)
            {
                // inner surrogate ascent at frozen parameters
                double D_best = surrogate(states);
                for (arma::uword inner = 0; inner < settings.max_iter; ++inner)
                {
                    const PhaseConfig before = phases;
                    for (arma::uword k = 0; k < K; ++k)
                    {
                        arma::vec step(set.Ns, arma::fill::zeros);
                        for (std::size_t ti = 0; ti < terms.size(); ++ti)
                            for (arma::uword m : terms[ti].subset)
                            {
                                const double tr = states[ti].t_1(k) * states[ti].r_2(k, m);
                                if (tr == 0.0)
                                    continue;
                                const std::complex<double> kap = kappa(k, m);
                                const double den = 1.0 + Ns * Ns * tr * std::norm(kap);
                                const arma::cx_vec &c = cvec[set.km(k, m)];
                                for (arma::uword n = 0; n < set.Ns; ++n)
                                {
                                    const std::complex<double> ph =
                                        std::conj(c(n)) * std::polar(1.0, -phases.phases[k](n));
                                    step(n) += terms[ti].weight * Ns * Ns * tr *
                                               std::imag(kap * ph) / den;
                                }
                            }
                        phases.phases[k] += eps * step;
                    }
                    const double D = surrogate(states);
                    if (D + 1e-14 < D_best && halvings < kMaxHalvings)
                    {
                        phases = before;
                        eps *= 0.5;
                        ++halvings;
                        continue;
                    }
                    D_best = std::max(D_best, D);
                    if (phase_step_norm(phases, before) < settings.tolerance)
                        break;
                }

                const double J_new = exact_objective(set, phases, Q, terms, fp_settings, states);
                result.trace.push_back({outer, J_new, std::abs(J_new - J), eps, true});
                if (J_new > best_J)
                {
                    best_J = J_new;
                    best_phases = phases;
                }
                const bool done = std::abs(J_new - J) < settings.tolerance * std::max(1.0, std::abs(J_new));
                J = J_new;
                if (done)
                    break;
            }

            result.objective = exact_objective(set, best_phases, Q, terms, fp_settings, result.states);
            result.phases = std::move(best_phases);
            result.iterations = outer;
            return result;
        }

        OptimizeResult to_result(CoreResult core, bool state_of_last_term)
        {
            OptimizeResult out;
            out.phases = std::move(core.phases);
            out.state = state_of_last_term ? std::move(core.states.back())
                                           : std::move(core.states.front());
            out.objective = core.objective;
            out.iterations = core.iterations;
            out.trace = std::move(core.trace);
            return out;
        }
    } // namespace

    OptimizeResult optimize_full(const CorrelationSet &set, const std::vector<arma::cx_mat> &Q,
                                 const Subset &subset, const OptimizerSettings &settings,
                                 const FixedPointSettings &fp_settings,
                                 const std::optional<PhaseConfig> &initial_phases,
                                 const std::vector<bool> &update_mask)
    {
        return to_result(optimize_core(set, Q, {{subset, 1.0}}, settings, fp_settings,
                                       initial_phases, update_mask),
                         false);
    }

    OptimizeResult optimize_semi(const CorrelationSet &set, const std::vector<arma::cx_mat> &Q,
                                 const Subset &subset, const OptimizerSettings &settings,
                                 const RankOneSpectra &spectra,
                                 const FixedPointSettings &fp_settings,
                                 const std::optional<PhaseConfig> &initial_phases)
    {
        return to_result(optimize_semi_terms(set, Q, {{subset, 1.0}}, settings, spectra,
                                             fp_settings, initial_phases),
                         false);
    }

    OptimizeResult weighted_objective_phases(const CorrelationSet &set,
                                             const std::vector<arma::cx_mat> &Q,
                                             const arma::vec &mu,
                                             const OptimizerSettings &settings,
                                             const FixedPointSettings &fp_settings,
                                             const std::optional<PhaseConfig> &initial_phases,
                                             const std::optional<RankOneSpectra> &spectra)
    {
        if (mu.n_elem != set.M)
            throw config_error("weighted_objective_phases: mu must have M entries");
        for (arma::uword i = 0; i < mu.n_elem; ++i)
        {
            if (mu(i) < 0.0)
                throw config_error("weighted_objective_phases: mu must be non-negative");
            if (i + 1 < mu.n_elem && mu(i) < mu(i + 1) - 1e-12)
                throw config_error("weighted_objective_phases: mu must be non-increasing");
        }
        const double total = arma::accu(mu);
        if (!(total > 0.0))
            throw config_error("weighted_objective_phases: mu must not be all zero");

        std::vector<ObjectiveTerm> terms;
        for (arma::uword l = 0; l < set.M; ++l)
        {
            const double w = (mu(l) - (l + 1 < set.M ? mu(l + 1) : 0.0)) / total;
            if (w > 1e-14)
            {
                Subset s;
                for (arma::uword m = 0; m <= l; ++m)
                    s.push_back(m);
                terms.push_back({std::move(s), w});
            }
        }

        if (settings.mode == OptimizerSettings::Mode::semi)
        {
            const RankOneSpectra sp = spectra ? *spectra : RankOneSpectra::from_correlations(set);
            return to_result(optimize_semi_terms(set, Q, terms, settings, sp, fp_settings,
                                                 initial_phases),
                             true);
        }
        return to_result(optimize_core(set, Q, terms, settings, fp_settings, initial_phases, {}),
                         true);
    }

    PhaseConfig quantize_phases(const PhaseConfig &config, OptimizerSettings::Quantization level)
    {
        if (level == OptimizerSettings::Quantization::none)
            return config;
        std::vector<double> codebook;
        if (level == OptimizerSettings::Quantization::one_bit)
            codebook = {0.0, arma::datum::pi};
        else
            codebook = {0.25 * arma::datum::pi, 0.75 * arma::datum::pi, 1.25 * arma::datum::pi,
                        1.75 * arma::datum::pi};

        auto wrap = [](double a) {
            a = std::fmod(a, 2.0 * arma::datum::pi);
            if (a > arma::datum::pi)
                a -= 2.0 * arma::datum::pi;
            if (a <= -arma::datum::pi)
                a += 2.0 * arma::datum::pi;
            return a;
        };
        PhaseConfig out = config;
        for (auto &phi : out.phases)
            for (arma::uword n = 0; n < phi.n_elem; ++n)
            {
                double best = codebook.front();
                double best_d = std::abs(wrap(phi(n) - best));
                for (double c : codebook)
                {
                    const double d = std::abs(wrap(phi(n) - c));
                    if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && c < best))
                    {
                        best = c;
                        best_d = d;
                    }
                }
                phi(n) = best;
            }
        return out;
    }

    RankOneSpectra RankOneSpectra::from_scenario(const ScenarioConfig &config)
    {
        const ArrayGeometry ris = ris_geometry(config);
        const arma::uword Ns = config.Ns;
        const double norm = 1.0 / std::sqrt(static_cast<double>(Ns));
        RankOneSpectra sp;
        sp.u.resize(config.K * config.M);
        sp.v.resize(config.K);
        sp.delta_q.resize(config.K * config.M);
        for (arma::uword k = 0; k < config.K; ++k)
        {
            const arma::vec3 qr = link_spectrum(config, config.ris_rx, k, 0).mean_wave_vector();
            sp.v[k].set_size(Ns);
            for (arma::uword n = 0; n < Ns; ++n)
                sp.v[k](n) = norm * std::polar(1.0, arma::dot(qr, ris.positions.col(n)));
            for (arma::uword m = 0; m < config.M; ++m)
            {
                const arma::vec3 qt = link_spectrum(config, config.tx_ris, k, m).mean_wave_vector();
                arma::cx_vec u(Ns);
                for (arma::uword n = 0; n < Ns; ++n)
                    u(n) = norm * std::polar(1.0, arma::dot(qt, ris.positions.col(n)));
                sp.u[k * config.M + m] = std::move(u);
                sp.delta_q[k * config.M + m] = qr - qt;
            }
        }
        return sp;
    }

    RankOneSpectra RankOneSpectra::from_correlations(const CorrelationSet &set)
    {
        const CorrelationFactors &fac = set.factors();
        const double norm = 1.0 / std::sqrt(static_cast<double>(set.Ns));
        auto project = [&](const MatrixFactor &f) {
            arma::cx_vec out(set.Ns);
            if (f.identity || f.d.n_elem == 0)
            {
                out.fill(norm); // no preferred direction
                return out;
            }
            const arma::cx_vec lead = f.U.col(0);
            for (arma::uword n = 0; n < set.Ns; ++n)
            {
                const double a = std::abs(lead(n));
                out(n) = a > 1e-300 ? norm * lead(n) / a : std::complex<double>(norm, 0.0);
            }
            return out;
        };
        RankOneSpectra sp;
        sp.u.resize(set.K * set.M);
        sp.v.resize(set.K);
        sp.delta_q.assign(set.K * set.M, arma::vec3(arma::fill::zeros));
        for (arma::uword k = 0; k < set.K; ++k)
        {
            sp.v[k] = project(fac.S_r[k]);
            for (arma::uword m = 0; m < set.M; ++m)
                sp.u[set.km(k, m)] = project(fac.S_t[set.km(k, m)]);
        }
        return sp;
    }

} // namespace rismac
