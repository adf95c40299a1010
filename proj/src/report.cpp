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

#include "rismac/report.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace rismac
{
    std::string format_number(double v)
    {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    }

    void ensure_directory(const std::string &path)
    {
        std::error_code ec;
        std::filesystem::create_directories(path, ec);
        if (ec)
            throw config_error("cannot create output directory '" + path + "': " + ec.message());
    }

    void write_text_file(const std::string &path, const std::string &content)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw config_error("cannot write '" + path + "'");
        out << content;
    }

    void write_csv(const std::string &path, const std::vector<std::string> &header,
                   const std::vector<std::vector<double>> &rows)
    {
        std::string text;
        for (std::size_t i = 0; i < header.size(); ++i)
        {
            if (i)
                text += ',';
            text += header[i];
        }
        text += '\n';
        for (const auto &row : rows)
        {
            for (std::size_t i = 0; i < row.size(); ++i)
            {
                if (i)
                    text += ',';
                text += format_number(row[i]);
            }
            text += '\n';
        }
        write_text_file(path, text);
    }

    void write_matrix_csv(const std::string &path, const arma::cx_mat &A)
    {
        std::vector<std::string> header;
        header.reserve(2 * A.n_cols);
        for (arma::uword j = 0; j < A.n_cols; ++j)
        {
            header.push_back("c" + std::to_string(j) + "_re");
            header.push_back("c" + std::to_string(j) + "_im");
        }
        std::vector<std::vector<double>> rows(A.n_rows);
        for (arma::uword i = 0; i < A.n_rows; ++i)
        {
            rows[i].reserve(2 * A.n_cols);
            for (arma::uword j = 0; j < A.n_cols; ++j)
            {
                rows[i].push_back(A(i, j).real());
                rows[i].push_back(A(i, j).imag());
            }
        }
        write_csv(path, header, rows);
    }

    std::string state_to_json(const FixedPointState &state)
    {
        nlohmann::ordered_json j;
        j["t_d"] = std::vector<double>(state.t_d.begin(), state.t_d.end());
        j["r_d"] = std::vector<double>(state.r_d.begin(), state.r_d.end());
        j["t_1"] = std::vector<double>(state.t_1.begin(), state.t_1.end());
        auto mat = [](const arma::mat &m) {
            std::vector<std::vector<double>> v;
            for (arma::uword k = 0; k < m.n_rows; ++k)
                v.emplace_back(m.row(k).begin(), m.row(k).end());
            return v;
        };
        j["r_1"] = mat(state.r_1);
        j["t_2"] = mat(state.t_2);
        j["r_2"] = mat(state.r_2);
        j["iterations"] = state.iterations;
        j["residual"] = state.residual;
        return j.dump(2);
    }

} // namespace rismac
