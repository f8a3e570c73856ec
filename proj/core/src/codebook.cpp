// SPDX-License-Identifier: Apache-2.0
//
// mmbeam - beam selection simulator for millimeter wave arrays of subarrays
// Copyright (C) 2026 the mmbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file
// except in compliance with the License. You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0.
//
// Unless required by applicable law or agreed to in writing, software distributed under the
// License is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND,
// either express or implied. See the License for the specific language governing permissions
// and limitations under the License.
// ------------------------------------------------------------------------------------------

#include "mmbeam/codebook.hpp"

#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mmbeam
{

RFCodebook uniform_codebook(double azimuth_lo, double azimuth_hi, std::size_t n_beams,
                            double elevation)
{
    if (n_beams < 1)
        throw std::invalid_argument("uniform_codebook: need at least one beam");
    if (!(azimuth_lo < azimuth_hi))
        throw std::invalid_argument("uniform_codebook: empty azimuth sector");

    RFCodebook cb;
    cb.beams.reserve(n_beams);
    const double width = (azimuth_hi - azimuth_lo) / double(n_beams);
    for (std::size_t i = 0; i < n_beams; i++)
        cb.beams.push_back({azimuth_lo + width * (double(i) + 0.5), elevation});
    return cb;
}

arma::cx_mat rf_precoder_matrix(const SubarrayLayout &layout, const RFCodebook &codebook,
                                const RFAssignment &assignment)
{
    if (assignment.size() != layout.n_subarrays())
        throw std::invalid_argument("rf_precoder_matrix: one beam index per subarray required");

    const std::size_t per = layout.subarray.size();
    arma::cx_mat f(layout.total_antennas(), layout.n_subarrays(), arma::fill::zeros);
    for (std::size_t s = 0; s < layout.n_subarrays(); s++)
    {
        if (assignment[s] >= codebook.size())
            throw std::out_of_range("rf_precoder_matrix: beam index out of range");
        f.submat(s * per, s, (s + 1) * per - 1, s) =
            steering_vector(layout.subarray, codebook.beams[assignment[s]]);
    }
    return f;
}

BBCodebook default_bb_codebook(std::size_t n_subarrays, std::size_t n_layers)
{
    if (n_subarrays != 2 || n_layers != 2)
        throw std::invalid_argument("default_bb_codebook: only the (2,2) set is built in");

    const std::complex<double> j(0.0, 1.0);
    const double s = 1.0 / std::sqrt(2.0);

    arma::cx_mat identity(2, 2, arma::fill::zeros);
    identity(0, 0) = s;
    identity(1, 1) = s;

    arma::cx_mat real_pair(2, 2);
    real_pair(0, 0) = 0.5;
    real_pair(0, 1) = 0.5;
    real_pair(1, 0) = 0.5;
    real_pair(1, 1) = -0.5;

    arma::cx_mat quad_pair(2, 2);
    quad_pair(0, 0) = 0.5;
    quad_pair(0, 1) = 0.5;
    quad_pair(1, 0) = 0.5 * j;
    quad_pair(1, 1) = -0.5 * j;

    BBCodebook cb;
    cb.matrices.push_back(std::move(identity));
    cb.matrices.push_back(std::move(real_pair));
    cb.matrices.push_back(std::move(quad_pair));
    return cb;
}

void save_rf_codebook(std::ostream &os, const RFCodebook &cb)
{
    constexpr double deg = 360.0 / two_pi;
    os << "# phi_deg,theta_deg\n";
    os.precision(17);
    for (const AnglePair &b : cb.beams)
        os << b.phi * deg << ',' << b.theta * deg << '\n';
}

RFCodebook load_rf_codebook(std::istream &is)
{
    constexpr double rad = two_pi / 360.0;
    RFCodebook cb;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line))
    {
        line_no++;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        double phi_deg = 0.0, theta_deg = 0.0;
        char sep = ',';
        if (!(ls >> phi_deg >> sep >> theta_deg) || sep != ',')
            throw std::runtime_error("load_rf_codebook: malformed line " +
                                     std::to_string(line_no));
        cb.beams.push_back({phi_deg * rad, theta_deg * rad});
    }
    if (cb.beams.empty())
        throw std::runtime_error("load_rf_codebook: no beams in file");
    return cb;
}

// "re+imj" with both parts always present, e.g. "0.5-0.25j".
static std::string format_complex(const std::complex<double> &z)
{
    std::ostringstream os;
    os.precision(17);
    os << z.real() << (z.imag() < 0.0 || std::signbit(z.imag()) ? "" : "+") << z.imag() << 'j';
    return os.str();
}

static std::complex<double> parse_complex(std::string tok, std::size_t line_no)
{
    std::erase_if(tok, [](unsigned char c) { return std::isspace(c); });
    if (tok.size() < 2 || tok.back() != 'j')
        throw std::runtime_error("load_bb_codebook: malformed complex value at line " +
                                 std::to_string(line_no));
    tok.pop_back();
    // Split at the sign of the imaginary part: the last '+'/'-' that is neither the
    // leading sign nor part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t i = tok.size(); i-- > 1;)
    {
        const char c = tok[i];
        if ((c == '+' || c == '-') && tok[i - 1] != 'e' && tok[i - 1] != 'E')
        {
            split = i;
            break;
        }
    }
    if (split == std::string::npos)
        throw std::runtime_error("load_bb_codebook: malformed complex value at line " +
                                 std::to_string(line_no));
    std::size_t used = 0;
    const double re = std::stod(tok.substr(0, split), &used);
    if (used != split)
        throw std::runtime_error("load_bb_codebook: malformed complex value at line " +
                                 std::to_string(line_no));
    const std::string im_part = tok.substr(split);
    const double im = std::stod(im_part, &used);
    if (used != im_part.size())
        throw std::runtime_error("load_bb_codebook: malformed complex value at line " +
                                 std::to_string(line_no));
    return {re, im};
}

void save_bb_codebook(std::ostream &os, const BBCodebook &cb)
{
    os << "# one matrix per block, rows of re+imj values, blank line between blocks\n";
    for (std::size_t m = 0; m < cb.size(); m++)
    {
        if (m > 0)
            os << '\n';
        const arma::cx_mat &f = cb.matrices[m];
        for (arma::uword r = 0; r < f.n_rows; r++)
        {
            for (arma::uword c = 0; c < f.n_cols; c++)
                os << (c > 0 ? "," : "") << format_complex(f(r, c));
            os << '\n';
        }
    }
}

BBCodebook load_bb_codebook(std::istream &is)
{
    BBCodebook cb;
    std::vector<std::vector<std::complex<double>>> rows;
    std::string line;
    std::size_t line_no = 0;

    auto flush_block = [&]() {
        if (rows.empty())
            return;
        const std::size_t n_cols = rows[0].size();
        arma::cx_mat f(rows.size(), n_cols);
        for (std::size_t r = 0; r < rows.size(); r++)
        {
            if (rows[r].size() != n_cols)
                throw std::runtime_error("load_bb_codebook: ragged matrix block");
            for (std::size_t c = 0; c < n_cols; c++)
                f(r, c) = rows[r][c];
        }
        cb.matrices.push_back(std::move(f));
        rows.clear();
    };

    while (std::getline(is, line))
    {
        line_no++;
        if (!line.empty() && line[0] == '#')
            continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
        {
            flush_block();
            continue;
        }
        std::vector<std::complex<double>> row;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ','))
            row.push_back(parse_complex(tok, line_no));
        rows.push_back(std::move(row));
    }
    flush_block();

    if (cb.matrices.empty())
        throw std::runtime_error("load_bb_codebook: no matrices in file");
    for (const arma::cx_mat &f : cb.matrices)
    {
        if (f.n_rows != cb.matrices[0].n_rows || f.n_cols != cb.matrices[0].n_cols)
            throw std::runtime_error("load_bb_codebook: inconsistent matrix dimensions");
        if (!f.is_finite())
            throw std::runtime_error("load_bb_codebook: non-finite entry");
    }
    return cb;
}

} // namespace mmbeam
