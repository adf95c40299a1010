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

#include "rismac/scenario.hpp"

#include <fstream>

#include <json.hpp>

namespace rismac
{
    using json = nlohmann::ordered_json;

    namespace
    {
        LinkSpec::Mode mode_from(const std::string &s)
        {
            if (s == "identity")
                return LinkSpec::Mode::identity;
            if (s == "computed")
                return LinkSpec::Mode::computed;
            throw config_error("scenario: unknown correlation mode '" + s + "'");
        }

        std::string mode_to(LinkSpec::Mode m)
        {
            return m == LinkSpec::Mode::identity ? "identity" : "computed";
        }

        LinkSpec parse_link(const json &j)
        {
            LinkSpec l;
            l.mode = mode_from(j.value("mode", std::string("identity")));
            l.sigma_deg = j.value("sigma_deg", 0.0);
            l.theta_deg = j.value("theta_deg", 0.0);
            if (j.contains("phi_deg"))
            {
                if (j["phi_deg"].is_array())
                    l.phi_deg = j["phi_deg"].get<std::vector<double>>();
                else
                    l.phi_deg = {j["phi_deg"].get<double>()};
            }
            l.hemisphere = j.value("hemisphere", false);
            return l;
        }

        json dump_link(const LinkSpec &l)
        {
            json j;
            j["mode"] = mode_to(l.mode);
            j["sigma_deg"] = l.sigma_deg;
            j["theta_deg"] = l.theta_deg;
            j["phi_deg"] = l.phi_deg;
            j["hemisphere"] = l.hemisphere;
            return j;
        }

        OptimizerSettings::Mode opt_mode_from(const std::string &s)
        {
            if (s == "full")
                return OptimizerSettings::Mode::full;
            if (s == "semi")
                return OptimizerSettings::Mode::semi;
            throw config_error("scenario: unknown optimizer mode '" + s + "'");
        }

        OptimizerSettings::Quantization quant_from(const std::string &s)
        {
            if (s == "none")
                return OptimizerSettings::Quantization::none;
            if (s == "1bit")
                return OptimizerSettings::Quantization::one_bit;
            if (s == "2bit")
                return OptimizerSettings::Quantization::two_bit;
            throw config_error("scenario: unknown quantization '" + s + "'");
        }

        std::string quant_to(OptimizerSettings::Quantization q)
        {
            switch (q)
            {
            case OptimizerSettings::Quantization::one_bit:
                return "1bit";
            case OptimizerSettings::Quantization::two_bit:
                return "2bit";
            default:
                return "none";
            }
        }
    } // namespace

    void ScenarioConfig::validate() const
    {
        if (M < 1 || Nt < 1 || Nr < 1)
            throw config_error("scenario: M, Nt, Nr must be >= 1");
        if (K > 0 && Ns < 1)
            throw config_error("scenario: Ns must be >= 1 when K > 0");
        if (!(wavelength > 0.0))
            throw config_error("scenario: wavelength must be > 0");
        if (std::isnan(rho_dB) || rho_dB > 1e12 || (!gamma_zero && !std::isfinite(gamma_d_dB)))
            throw config_error("scenario: dB fields must be finite (rho_dB may be \"-inf\")");
        if (K > 0 && ris_nx * ris_ny != Ns)
            throw config_error("scenario: ris grid nx*ny must equal Ns");
        auto check_link = [](const LinkSpec &l, const char *name) {
            if (l.mode == LinkSpec::Mode::computed && !(l.sigma_deg > 0.0))
                throw config_error(std::string("scenario: computed link '") + name +
                                   "' needs sigma_deg > 0");
        };
        check_link(tx_ris, "tx_ris");
        check_link(ris_rx, "ris_rx");
        check_link(tx_corr, "tx_corr");
        check_link(rx_corr, "rx_corr");
        for (const auto &mu : mu_grid)
            if (mu.size() != M)
                throw config_error("scenario: each mu vector must have M entries");
        if (optimizer.max_iter < 1 || !(optimizer.step_size > 0.0) || !(optimizer.tolerance > 0.0))
            throw config_error("scenario: optimizer needs max_iter >= 1, step_size > 0, tolerance > 0");
    }

    ScenarioConfig parse_scenario(const std::string &text)
    {
        json j;
        try
        {
            j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
        }
        catch (const std::exception &e)
        {
            throw config_error(std::string("scenario: JSON parse failure: ") + e.what());
        }

        ScenarioConfig c;
        try
        {
            c.schema_version = j.value("schema_version", 1);
            const auto &counts = j.at("counts");
            c.M = counts.at("M").get<arma::uword>();
            c.K = counts.at("K").get<arma::uword>();
            c.Nt = counts.at("Nt").get<arma::uword>();
            c.Nr = counts.at("Nr").get<arma::uword>();
            c.Ns = counts.at("Ns").get<arma::uword>();
            c.wavelength = j.value("wavelength_m", 0.12);
            if (j.contains("rho_dB") && j["rho_dB"].is_string())
            {
                if (j["rho_dB"].get<std::string>() != "-inf")
                    throw config_error("scenario: rho_dB must be a number or \"-inf\"");
                c.rho_dB = -arma::datum::inf; // maps to zero linear power
            }
            else
                c.rho_dB = j.value("rho_dB", 10.0);
            if (j.contains("gamma_d_dB") && j["gamma_d_dB"].is_number())
            {
                c.gamma_zero = false;
                c.gamma_d_dB = j["gamma_d_dB"].get<double>();
            }
            else
                c.gamma_zero = true; // "zero" or absent

            if (j.contains("ris"))
            {
                const auto &r = j["ris"];
                if (r.contains("grid"))
                {
                    c.ris_nx = r["grid"][0].get<arma::uword>();
                    c.ris_ny = r["grid"][1].get<arma::uword>();
                }
                c.ris_spacing = r.value("spacing_m", 0.06);
                if (r.contains("mirror"))
                    c.ris_mirror = r["mirror"].get<std::vector<bool>>();
            }
            c.tx_spacing_factor = j.value("tx_spacing_factor", 0.5);
            c.rx_spacing_factor = j.value("rx_spacing_factor", 0.5);

            if (j.contains("links"))
            {
                const auto &l = j["links"];
                if (l.contains("tx_ris"))
                    c.tx_ris = parse_link(l["tx_ris"]);
                if (l.contains("ris_rx"))
                    c.ris_rx = parse_link(l["ris_rx"]);
                if (l.contains("tx_corr"))
                    c.tx_corr = parse_link(l["tx_corr"]);
                if (l.contains("rx_corr"))
                    c.rx_corr = parse_link(l["rx_corr"]);
            }

            if (j.contains("optimizer"))
            {
                const auto &o = j["optimizer"];
                c.optimizer.mode = opt_mode_from(o.value("mode", std::string("full")));
                c.optimizer.quantization = quant_from(o.value("quantization", std::string("none")));
                c.optimizer.step_size = o.value("step_size", 1.0);
                c.optimizer.tolerance = o.value("tolerance", 1e-6);
                c.optimizer.max_iter = o.value("max_iter", static_cast<arma::uword>(2000));
            }
            if (j.contains("fixed_point"))
            {
                const auto &f = j["fixed_point"];
                c.fixed_point.tolerance = f.value("tolerance", 1e-10);
                c.fixed_point.max_iter = f.value("max_iter", static_cast<arma::uword>(10000));
                c.fixed_point.damping = f.value("damping", 0.5);
            }
            if (j.contains("mc"))
            {
                const auto &m = j["mc"];
                c.mc.n_draws = m.value("n_draws", static_cast<arma::uword>(10000));
                c.mc.seed = m.value("seed", static_cast<std::uint64_t>(1));
            }
            if (j.contains("mu_grid"))
                c.mu_grid = j["mu_grid"].get<std::vector<std::vector<double>>>();
            c.mu_points = j.value("mu_points", static_cast<arma::uword>(11));
            if (j.contains("rate_grid"))
                c.rate_grid = j["rate_grid"].get<std::vector<double>>();
            c.output_dir = j.value("output_dir", std::string("out"));
            c.threads = j.value("threads", 0u);
        }
        catch (const config_error &)
        {
            throw;
        }
        catch (const std::exception &e)
        {
            throw config_error(std::string("scenario: invalid config: ") + e.what());
        }
        c.validate();
        return c;
    }

    ScenarioConfig load_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw config_error("scenario: cannot open '" + path + "'");
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return parse_scenario(text);
    }

    std::string serialize_scenario(const ScenarioConfig &c)
    {
        json j;
        j["schema_version"] = c.schema_version;
        j["counts"] = {{"M", c.M}, {"K", c.K}, {"Nt", c.Nt}, {"Nr", c.Nr}, {"Ns", c.Ns}};
        j["wavelength_m"] = c.wavelength;
        if (std::isinf(c.rho_dB))
            j["rho_dB"] = "-inf";
        else
            j["rho_dB"] = c.rho_dB;
        j["rho_linear"] = c.rho_linear(); // echoed conversion, ignored on parse
        if (c.gamma_zero)
            j["gamma_d_dB"] = "zero";
        else
            j["gamma_d_dB"] = c.gamma_d_dB;
        j["gamma_d_linear"] = c.gamma_linear();
        j["ris"] = {{"grid", {c.ris_nx, c.ris_ny}}, {"spacing_m", c.ris_spacing}};
        if (!c.ris_mirror.empty())
            j["ris"]["mirror"] = c.ris_mirror;
        j["tx_spacing_factor"] = c.tx_spacing_factor;
        j["rx_spacing_factor"] = c.rx_spacing_factor;
        j["links"] = {{"tx_ris", dump_link(c.tx_ris)},
                      {"ris_rx", dump_link(c.ris_rx)},
                      {"tx_corr", dump_link(c.tx_corr)},
                      {"rx_corr", dump_link(c.rx_corr)}};
        j["optimizer"] = {{"mode", c.optimizer.mode == OptimizerSettings::Mode::full ? "full" : "semi"},
                          {"quantization", quant_to(c.optimizer.quantization)},
                          {"step_size", c.optimizer.step_size},
                          {"tolerance", c.optimizer.tolerance},
                          {"max_iter", c.optimizer.max_iter}};
        j["fixed_point"] = {{"tolerance", c.fixed_point.tolerance},
                            {"max_iter", c.fixed_point.max_iter},
                            {"damping", c.fixed_point.damping}};
        j["mc"] = {{"n_draws", c.mc.n_draws}, {"seed", c.mc.seed}};
        if (!c.mu_grid.empty())
            j["mu_grid"] = c.mu_grid;
        j["mu_points"] = c.mu_points;
        if (!c.rate_grid.empty())
            j["rate_grid"] = c.rate_grid;
        j["output_dir"] = c.output_dir;
        j["threads"] = c.threads;
        return j.dump(2);
    }

} // namespace rismac
