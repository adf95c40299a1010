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

#ifndef rismac_report_H
#define rismac_report_H

#include <string>
#include <vector>

#include <armadillo>

#include "rismac/fixed_point.hpp"

namespace rismac
{
    // Shortest round-trip decimal representation; keeps reports byte-stable.
    std::string format_number(double v);

    void write_text_file(const std::string &path, const std::string &content);

    // UTF-8 CSV with a header row; every cell is format_number'd.
    void write_csv(const std::string &path, const std::vector<std::string> &header,
                   const std::vector<std::vector<double>> &rows);

    // Row-major dump with complex entries as "re,im" pairs (2n columns).
    void write_matrix_csv(const std::string &path, const arma::cx_mat &A);

    std::string state_to_json(const FixedPointState &state);

    void ensure_directory(const std::string &path);

} // namespace rismac

#endif
