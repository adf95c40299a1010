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
//
// Batch front door: scenario JSON in, CSV/JSON results out.
//   rismac solve|optimize|region|montecarlo|outage|correlations --config FILE

#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rismac/channel.hpp"
#include "rismac/correlation.hpp"
#include "rismac/fixed_point.hpp"
#include "rismac/phases.hpp"
#include "rismac/region.hpp"
#include "rismac/report.hpp"
#include "rismac/scenario.hpp"
#include "rismac/variance.hpp"
#include "rismac/waterfill.hpp"

namespace
{
    using json = nlohmann::ordered_json;
    using namespace rismac;

    struct CliOptions
    {
        std::string config_path;
        std::string out_dir;       // overrides config
        unsigned threads = 0;      // overrides config when nonzero
        std::uint64_t seed = 0;    // overrides config when set
        bool seed_set = false;
        std::string quant;         // none|1bit|2bit
        std::string mode;          // full|semi
        bool freeze_phases = false;
        bool bits = false;
        std::string matrix;        // filter for `correlations`
    };

    double unit_scale(const CliOptions &o) { return o.bits ? 1.0 / std::log(2.0) : 1.0; }
    const char *unit_name(const CliOptions &o) { return o.bits ? "bits" : "nats"; }

    ScenarioConfig load_config(CliOptions &opt)
    {
        ScenarioConfig cfg = load_scenario(opt.config_path);
        if (!opt.out_dir.empty())
            cfg.output_dir = opt.out_dir;
        if (opt.threads != 0)
            cfg.threads = opt.threads;
        if (opt.seed_set)
            cfg.mc.seed = opt.seed;
        if (!opt.mode.empty())
            cfg.optimizer.mode = opt.mode == "semi" ? OptimizerSettings::Mode::semi
                                                    : OptimizerSettings::Mode::full;
        if (!opt.quant.empty())
        {
            if (opt.quant == "none")
                cfg.optimizer.quantization = OptimizerSettings::Quantization::none;
            else if (opt.quant == "1bit")
                cfg.optimizer.quantization = OptimizerSettings::Quantization::one_bit;
            else if (opt.quant == "2bit")
                cfg.optimizer.quantization = OptimizerSettings::Quantization::two_bit;
            else
                throw config_error("unknown --quant value '" + opt.quant + "'");
        }
        ensure_directory(cfg.output_dir);
        return cfg;
    }

    json base_report(const char *command, const ScenarioConfig &cfg, const CliOptions &opt)
    {
        json j;
        j["schema_version"] = 1;
        j["command"] = command;
        j["unit"] = unit_name(opt);
        j["config"] = json::parse(serialize_scenario(cfg));
        return j;
    }

    void write_phases_csv(const std::string &path, const PhaseConfig &phases)
    {
        std::vector<std::string> header = {"ris"};
        const arma::uword Ns = phases.phases.empty() ? 0 : phases.phases.front().n_elem;
        for (arma::uword n = 0; n < Ns; ++n)
            header.push_back("n" + std::to_string(n));
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < phases.phases.size(); ++k)
        {
            std::vector<double> row = {static_cast<double>(k)};
            row.insert(row.end(), phases.phases[k].begin(), phases.phases[k].end());
            rows.push_back(std::move(row));
        }
        write_csv(path, header, rows);
    }

    void write_trace_csv(const std::string &path, const std::vector<OptimizeTraceRow> &trace,
                         double scale)
    {
        std::vector<std::vector<double>> rows;
        for (const auto &t : trace)
            rows.push_back({static_cast<double>(t.iteration), scale * t.objective, t.residual,
                            t.step_size, t.accepted ? 1.0 : 0.0});
        write_csv(path, {"iteration", "objective", "residual", "step_size", "accepted"}, rows);
    }

    int cmd_solve(CliOptions &opt)
    {
        const ScenarioConfig cfg = load_config(opt);
        const CorrelationSet set = build_correlation_set(cfg);
        const auto Q = uniform_covariance(set.M, set.Nt, set.rho);
        const PhaseConfig phases = PhaseConfig::identity(set.K, set.Ns);
        const Subset everyone = all_users(set.M);

        const FixedPointState state =
            solve_fixed_point(set, phases, Q, everyone, cfg.fixed_point);
        const double C = ergodic_mi(set, phases, Q, everyone, state);
        const double s = unit_scale(opt);

        json rep = base_report("solve", cfg, opt);
        rep["C_per_antenna"] = s * C;
        rep["mean_total"] = s * C * static_cast<double>(set.Nt);
        rep["state"] = json::parse(state_to_json(state));
        rep["iterations"] = state.iterations;
        rep["residual"] = state.residual;
        write_text_file(cfg.output_dir + "/solve.json", rep.dump(2) + "\n");
        std::cout << "C = " << format_number(s * C) << " " << unit_name(opt)
                  << "/channel use per TX antenna (Nt*C = "
                  << format_number(s * C * static_cast<double>(set.Nt)) << ")\n";
        return 0;
    }

    int cmd_optimize(CliOptions &opt)
    {
        const ScenarioConfig cfg = load_config(opt);
        const CorrelationSet set = build_correlation_set(cfg);
        const auto Q = uniform_covariance(set.M, set.Nt, set.rho);
        const Subset everyone = all_users(set.M);
        const PhaseConfig identity = PhaseConfig::identity(set.K, set.Ns);
        const double s = unit_scale(opt);

        const FixedPointState id_state =
            solve_fixed_point(set, identity, Q, everyone, cfg.fixed_point);
        const double C_identity = ergodic_mi(set, identity, Q, everyone, id_state);

        json rep = base_report("optimize", cfg, opt);
        rep["identity_mean_total"] = s * C_identity * static_cast<double>(set.Nt);

        if (opt.freeze_phases)
        {
            write_phases_csv(cfg.output_dir + "/phases.csv", identity);
            rep["mean_total"] = rep["identity_mean_total"];
            write_text_file(cfg.output_dir + "/optimize.json", rep.dump(2) + "\n");
            return 0;
        }

        OptimizeResult res;
        if (cfg.optimizer.mode == OptimizerSettings::Mode::semi)
            res = optimize_semi(set, Q, everyone, cfg.optimizer,
                                RankOneSpectra::from_scenario(cfg), cfg.fixed_point);
        else
            res = optimize_full(set, Q, everyone, cfg.optimizer, cfg.fixed_point);

        rep["mode"] = cfg.optimizer.mode == OptimizerSettings::Mode::semi ? "semi" : "full";
        rep["mean_total"] = s * res.objective;
        rep["gain_over_identity"] =
            s * (res.objective - C_identity * static_cast<double>(set.Nt));
        rep["iterations"] = res.iterations;
        rep["state"] = json::parse(state_to_json(res.state));
        write_phases_csv(cfg.output_dir + "/phases.csv", res.phases);
        write_trace_csv(cfg.output_dir + "/trace.csv", res.trace, s);

        if (cfg.optimizer.quantization != OptimizerSettings::Quantization::none)
        {
            const PhaseConfig quant = quantize_phases(res.phases, cfg.optimizer.quantization);
            const FixedPointState qs = solve_fixed_point(set, quant, Q, everyone, cfg.fixed_point);
            const double Cq = ergodic_mi(set, quant, Q, everyone, qs);
            rep["quantized_mean_total"] = s * Cq * static_cast<double>(set.Nt);
            write_phases_csv(cfg.output_dir + "/phases_quantized.csv", quant);
        }
        write_text_file(cfg.output_dir + "/optimize.json", rep.dump(2) + "\n");
        std::cout << "optimized Nt*C = " << format_number(rep["mean_total"].get<double>()) << " "
                  << unit_name(opt) << " (identity "
                  << format_number(rep["identity_mean_total"].get<double>()) << ")\n";
        return 0;
    }

    int cmd_region(CliOptions &opt)
    {
        const ScenarioConfig cfg = load_config(opt);
        const CorrelationSet set = build_correlation_set(cfg);
        const auto Q = uniform_covariance(set.M, set.Nt, set.rho);
        const double s = unit_scale(opt);

        std::vector<arma::vec> grid;
        if (!cfg.mu_grid.empty())
            for (const auto &mu : cfg.mu_grid)
                grid.push_back(arma::vec(mu));
        else if (set.M == 2)
            grid = mu_grid_two_users(cfg.mu_points);
        else
            throw config_error("region: explicit mu_grid required for M != 2");

        const auto points = region_boundary(set, Q, grid, cfg.optimizer, cfg.fixed_point,
                                            /*warm_start=*/true, opt.freeze_phases);

        std::vector<std::string> header;
        for (arma::uword m = 0; m < set.M; ++m)
            header.push_back("mu_" + std::to_string(m));
        for (arma::uword m = 0; m < set.M; ++m)
            header.push_back("R_" + std::to_string(m));
        for (arma::uword l = 0; l < set.M; ++l)
            header.push_back("C_nested_" + std::to_string(l + 1));
        for (arma::uword l = 0; l < set.M; ++l)
            header.push_back("order_" + std::to_string(l));
        header.push_back("ok");
        std::vector<std::vector<double>> rows;
        for (const auto &p : points)
        {
            std::vector<double> row;
            for (arma::uword m = 0; m < set.M; ++m)
                row.push_back(p.mu(m));
            for (arma::uword m = 0; m < set.M; ++m)
                row.push_back(p.ok ? s * p.rates(m) : 0.0);
            for (arma::uword l = 0; l < set.M; ++l)
                row.push_back(p.ok ? s * p.subset_mis(l) : 0.0);
            for (arma::uword l = 0; l < set.M; ++l)
                row.push_back(static_cast<double>(p.order(l)));
            row.push_back(p.ok ? 1.0 : 0.0);
            rows.push_back(std::move(row));
        }
        write_csv(cfg.output_dir + "/region.csv", header, rows);
        std::cout << "region: " << rows.size() << " points -> " << cfg.output_dir
                  << "/region.csv\n";
        return 0;
    }

    int cmd_montecarlo(CliOptions &opt)
    {
        const ScenarioConfig cfg = load_config(opt);
        const CorrelationSet set = build_correlation_set(cfg);
        const auto Q = uniform_covariance(set.M, set.Nt, set.rho);
        const PhaseConfig phases = PhaseConfig::identity(set.K, set.Ns);
        const Subset everyone = all_users(set.M);
        const double s = unit_scale(opt);

        const McStatistics mc = mc_statistics(set, phases, Q, everyone, cfg.mc.n_draws,
                                              cfg.mc.seed, cfg.threads);
        const FixedPointState state =
            solve_fixed_point(set, phases, Q, everyone, cfg.fixed_point);
        const double C = ergodic_mi(set, phases, Q, everyone, state);
        const double mean_total = C * static_cast<double>(set.Nt);
        const LambdaBlocks blocks = assemble_lambda(set, phases, Q, state);
        const double var = variance(blocks);

        json rep = base_report("montecarlo", cfg, opt);
        rep["n_draws"] = cfg.mc.n_draws;
        rep["seed"] = cfg.mc.seed;
        rep["mc_mean"] = s * mc.mean;
        rep["mc_variance"] = s * s * mc.variance;
        rep["mc_se_mean"] = s * mc.se_mean;
        rep["mc_se_variance"] = s * s * mc.se_variance;
        rep["analytic_mean"] = s * mean_total;
        rep["analytic_variance"] = s * s * var;
        rep["mean_rel_gap"] = std::abs(mean_total - mc.mean) / std::max(std::abs(mc.mean), 1e-300);
        rep["variance_rel_gap"] =
            std::abs(var - mc.variance) / std::max(std::abs(mc.variance), 1e-300);
        write_text_file(cfg.output_dir + "/mc_summary.json", rep.dump(2) + "\n");

        std::vector<std::vector<double>> rows(mc.sorted_samples.n_elem);
        for (arma::uword i = 0; i < mc.sorted_samples.n_elem; ++i)
            rows[i] = {static_cast<double>(i), s * mc.sorted_samples(i)};
        write_csv(cfg.output_dir + "/mc_samples.csv", {"rank", "mi"}, rows);
        std::cout << "mc mean " << format_number(s * mc.mean) << " vs analytic "
                  << format_number(s * mean_total) << " (" << unit_name(opt) << ")\n";
        return 0;
    }

    int cmd_outage(CliOptions &opt)
    {
        const ScenarioConfig cfg = load_config(opt);
        const CorrelationSet set = build_correlation_set(cfg);
        const auto Q = uniform_covariance(set.M, set.Nt, set.rho);
        const PhaseConfig phases = PhaseConfig::identity(set.K, set.Ns);
        const Subset everyone = all_users(set.M);
        const double s = unit_scale(opt);

        const FixedPointState state =
            solve_fixed_point(set, phases, Q, everyone, cfg.fixed_point);
        const double mean_total =
            ergodic_mi(set, phases, Q, everyone, state) * static_cast<double>(set.Nt);
        const double var = variance(assemble_lambda(set, phases, Q, state));
        const McStatistics mc = mc_statistics(set, phases, Q, everyone, cfg.mc.n_draws,
                                              cfg.mc.seed, cfg.threads);

        std::vector<double> rates = cfg.rate_grid;
        if (rates.empty())
        {
            const double sd = std::sqrt(var);
            for (int i = 0; i <= 100; ++i)
                rates.push_back(mean_total + sd * (-5.0 + 0.1 * i));
        }
        std::vector<std::vector<double>> rows;
        const arma::vec &samples = mc.sorted_samples;
        for (double r : rates)
        {
            const double p_gauss = gaussian_outage(mean_total, var, r);
            const auto it = std::lower_bound(samples.begin(), samples.end(), r);
            const double p_emp = static_cast<double>(it - samples.begin()) /
                                 static_cast<double>(samples.n_elem);
            rows.push_back({s * r, p_gauss, p_emp});
        }
        write_csv(cfg.output_dir + "/outage.csv", {"rate", "p_out_gaussian", "p_out_empirical"},
                  rows);
        std::cout << "outage table (" << rows.size() << " rates) -> " << cfg.output_dir
                  << "/outage.csv\n";
        return 0;
    }

    int cmd_correlations(CliOptions &opt)
    {
        const ScenarioConfig cfg = load_config(opt);
        const CorrelationSet set = build_correlation_set(cfg);
        auto want = [&](const std::string &name) {
            return opt.matrix.empty() || opt.matrix == name;
        };
        for (arma::uword m = 0; m < set.M; ++m)
        {
            if (want("R_d" + std::to_string(m)))
                write_matrix_csv(cfg.output_dir + "/R_d" + std::to_string(m) + ".csv", set.R_d[m]);
            if (want("T_d" + std::to_string(m)))
                write_matrix_csv(cfg.output_dir + "/T_d" + std::to_string(m) + ".csv", set.T_d[m]);
        }
        for (arma::uword k = 0; k < set.K; ++k)
        {
            if (want("R_" + std::to_string(k)))
                write_matrix_csv(cfg.output_dir + "/R_" + std::to_string(k) + ".csv", set.R[k]);
            if (want("S_r" + std::to_string(k)))
                write_matrix_csv(cfg.output_dir + "/S_r" + std::to_string(k) + ".csv", set.S_r[k]);
            for (arma::uword m = 0; m < set.M; ++m)
            {
                const std::string suffix = std::to_string(k) + "_" + std::to_string(m);
                if (want("S_t" + suffix))
                    write_matrix_csv(cfg.output_dir + "/S_t" + suffix + ".csv",
                                     set.S_t[set.km(k, m)]);
                if (want("T_" + suffix))
                    write_matrix_csv(cfg.output_dir + "/T_" + suffix + ".csv", set.T[set.km(k, m)]);
            }
        }
        std::cout << "correlation matrices -> " << cfg.output_dir << "\n";
        return 0;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"asymptotic capacity toolkit for RIS-assisted MIMO multiple access"};
    app.require_subcommand(1);
    CliOptions opt;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", opt.config_path, "scenario JSON file")->required();
        sub->add_option("--out", opt.out_dir, "output directory (overrides config)");
        sub->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
        sub->add_option("--seed", opt.seed, "Monte Carlo base seed override")
            ->each([&](const std::string &) { opt.seed_set = true; });
        sub->add_flag("--bits", opt.bits, "report bits instead of nats");
        return sub;
    };

    auto *solve = add_common(app.add_subcommand("solve", "deterministic-equivalent mean"));
    auto *optimize = add_common(app.add_subcommand("optimize", "RIS phase optimization"));
    optimize->add_option("--mode", opt.mode, "full|semi")
        ->check(CLI::IsMember({"full", "semi"}));
    optimize->add_option("--quant", opt.quant, "none|1bit|2bit")
        ->check(CLI::IsMember({"none", "1bit", "2bit"}));
    optimize->add_flag("--freeze-phases", opt.freeze_phases, "keep Phi = I");
    auto *region = add_common(app.add_subcommand("region", "capacity-region boundary sweep"));
    region->add_option("--mode", opt.mode, "full|semi")->check(CLI::IsMember({"full", "semi"}));
    region->add_flag("--freeze-phases", opt.freeze_phases, "trace the Phi = I pentagon");
    auto *mc = add_common(app.add_subcommand("montecarlo", "exact channel Monte Carlo"));
    auto *outage = add_common(app.add_subcommand("outage", "Gaussian outage table"));
    auto *corr = add_common(app.add_subcommand("correlations", "dump correlation matrices"));
    corr->add_option("--matrix", opt.matrix, "dump only the named matrix");

    CLI11_PARSE(app, argc, argv);
    try
    {
        if (solve->parsed())
            return cmd_solve(opt);
        if (optimize->parsed())
            return cmd_optimize(opt);
        if (region->parsed())
            return cmd_region(opt);
        if (mc->parsed())
            return cmd_montecarlo(opt);
        if (outage->parsed())
            return cmd_outage(opt);
        if (corr->parsed())
            return cmd_correlations(opt);
    }
    catch (const rismac::config_error &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    catch (const rismac::convergence_error &e)
    {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
