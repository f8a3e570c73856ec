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

#include "mmbeam/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmbeam
{

using cx = std::complex<double>;

std::uint64_t search_space_size(std::uint64_t n_rx_beams, std::uint64_t n_rx_subarrays,
                                std::uint64_t n_tx_beams, std::uint64_t n_tx_subarrays,
                                std::uint64_t n_bb)
{
    auto mul = [](std::uint64_t a, std::uint64_t b) {
        if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
            throw std::overflow_error("search_space_size: combination count overflows");
        return a * b;
    };
    std::uint64_t k = n_bb;
    for (std::uint64_t s = 0; s < n_rx_subarrays; s++)
        k = mul(k, n_rx_beams);
    for (std::uint64_t s = 0; s < n_tx_subarrays; s++)
        k = mul(k, n_tx_beams);
    return k;
}

// Eigenvalues of H_c^H H_c (the squared singular values), smallest sizes in closed
// form, anything larger through LAPACK. hc is column-major n_rows x n_cols.
static void squared_singular_values(const cx *hc, std::size_t n_rows, std::size_t n_cols,
                                    std::vector<double> &out)
{
    out.clear();
    if (n_cols == 1)
    {
        double a = 0.0;
        for (std::size_t i = 0; i < n_rows; i++)
            a += std::norm(hc[i]);
        out.push_back(a);
        return;
    }
    if (n_cols == 2)
    {
        double a = 0.0, b = 0.0;
        cx c(0.0, 0.0);
        const cx *c0 = hc, *c1 = hc + n_rows;
        for (std::size_t i = 0; i < n_rows; i++)
        {
            a += std::norm(c0[i]);
            b += std::norm(c1[i]);
            c += std::conj(c0[i]) * c1[i];
        }
        const double tr = a + b;
        const double disc = std::sqrt((a - b) * (a - b) + 4.0 * std::norm(c));
        out.push_back(std::max(0.0, 0.5 * (tr + disc)));
        out.push_back(std::max(0.0, 0.5 * (tr - disc)));
        return;
    }
    arma::cx_mat m(const_cast<cx *>(hc), n_rows, n_cols, /*copy*/ true, /*strict*/ true);
    arma::vec s = arma::svd(m);
    for (arma::uword k = 0; k < s.n_elem; k++)
        out.push_back(s(k) * s(k));
}

static double mi_from_squared_svs(const std::vector<double> &lam, double sigma2)
{
    constexpr double inv_ln2 = 1.4426950408889634073599246810019;
    double mi = 0.0;
    for (double l : lam)
        mi += std::log1p(l / sigma2) * inv_ln2;
    return mi;
}

double mutual_information(const arma::cx_mat &h_c, double sigma2)
{
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("mutual_information: sigma2 must be positive");
    std::vector<double> lam;
    squared_singular_values(h_c.memptr(), h_c.n_rows, h_c.n_cols, lam);
    return mi_from_squared_svs(lam, sigma2);
}

arma::cx_mat compressed_channel(const MeasurementTensor &t, const PrecoderSelection &sel,
                                const BBCodebook &bb)
{
    const std::size_t n_rx_sa = t.n_rx_subarrays();
    const std::size_t n_tx_sa = t.n_tx_subarrays();
    if (sel.rx_assignment.size() != n_rx_sa || sel.tx_assignment.size() != n_tx_sa)
        throw std::invalid_argument("compressed_channel: assignment length mismatch");
    if (sel.bb_index >= bb.size())
        throw std::out_of_range("compressed_channel: bb index out of range");
    const arma::cx_mat &f_bb = bb.matrices[sel.bb_index];
    if (f_bb.n_rows != n_tx_sa)
        throw std::invalid_argument("compressed_channel: bb rows must equal tx subarrays");

    arma::cx_mat m(n_rx_sa, n_tx_sa);
    for (std::size_t i = 0; i < n_rx_sa; i++)
        for (std::size_t j = 0; j < n_tx_sa; j++)
        {
            if (sel.rx_assignment[i] >= t.n_rx_beams() || sel.tx_assignment[j] >= t.n_tx_beams())
                throw std::out_of_range("compressed_channel: beam index out of range");
            m(i, j) = t(i, j, sel.rx_assignment[i], sel.tx_assignment[j]);
        }
    return m * f_bb;
}

namespace
{

// Shared enumeration engine. Candidate lists are sorted unique codebook indices.
// The winner is the maximum mutual information; exact ties resolve to the smallest
// (bb_index, tx_assignment, rx_assignment) tuple, making the outcome independent of
// enumeration order.
SearchResult enumerate_selections(const MeasurementTensor &t, const BBCodebook &bb,
                                  double sigma2, const std::vector<std::size_t> &rx_cands,
                                  const std::vector<std::size_t> &tx_cands)
{
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("search: sigma2 must be positive");
    if (bb.size() == 0)
        throw std::invalid_argument("search: empty baseband codebook");

    const std::size_t n_rx_sa = t.n_rx_subarrays();
    const std::size_t n_tx_sa = t.n_tx_subarrays();
    const std::size_t n_layers = bb.n_layers();
    for (const arma::cx_mat &f : bb.matrices)
        if (f.n_rows != n_tx_sa || f.n_cols != n_layers)
            throw std::invalid_argument("search: bb matrices must share n_tx_sa x n_layers");

    SearchResult best;
    best.mutual_info = -1.0;
    best.combinations = search_space_size(rx_cands.size(), n_rx_sa, tx_cands.size(), n_tx_sa,
                                          bb.size());

    // Odometer positions into the candidate lists; the lists are sorted, so
    // advancing the last position fastest walks assignments lexicographically.
    std::vector<std::size_t> tx_pos(n_tx_sa, 0), rx_pos(n_rx_sa, 0);
    RFAssignment tx_asg(n_tx_sa), rx_asg(n_rx_sa);

    std::vector<cx> m(n_rx_sa * n_tx_sa);  // column-major
    std::vector<cx> hc(n_rx_sa * n_layers);
    std::vector<double> lam;

    auto advance = [](std::vector<std::size_t> &pos, std::size_t radix) {
        for (std::size_t d = pos.size(); d-- > 0;)
        {
            if (++pos[d] < radix)
                return true;
            pos[d] = 0;
        }
        return false;
    };

    auto tuple_less = [](std::size_t bb_a, const RFAssignment &txa, const RFAssignment &rxa,
                         std::size_t bb_b, const RFAssignment &txb, const RFAssignment &rxb) {
        if (bb_a != bb_b)
            return bb_a < bb_b;
        if (txa != txb)
            return std::lexicographical_compare(txa.begin(), txa.end(), txb.begin(), txb.end());
        return std::lexicographical_compare(rxa.begin(), rxa.end(), rxb.begin(), rxb.end());
    };

    do
    {
        for (std::size_t j = 0; j < n_tx_sa; j++)
            tx_asg[j] = tx_cands[tx_pos[j]];
        std::fill(rx_pos.begin(), rx_pos.end(), 0);
        do
        {
            for (std::size_t i = 0; i < n_rx_sa; i++)
                rx_asg[i] = rx_cands[rx_pos[i]];
            for (std::size_t j = 0; j < n_tx_sa; j++)
                for (std::size_t i = 0; i < n_rx_sa; i++)
                    m[j * n_rx_sa + i] = t(i, j, rx_asg[i], tx_asg[j]);

            for (std::size_t b = 0; b < bb.size(); b++)
            {
                const arma::cx_mat &f = bb.matrices[b];
                for (std::size_t l = 0; l < n_layers; l++)
                    for (std::size_t i = 0; i < n_rx_sa; i++)
                    {
                        cx acc(0.0, 0.0);
                        for (std::size_t j = 0; j < n_tx_sa; j++)
                            acc += m[j * n_rx_sa + i] * f(j, l);
                        hc[l * n_rx_sa + i] = acc;
                    }
                squared_singular_values(hc.data(), n_rx_sa, n_layers, lam);
                const double mi = mi_from_squared_svs(lam, sigma2);

                const bool better =
                    mi > best.mutual_info ||
                    (mi == best.mutual_info &&
                     tuple_less(b, tx_asg, rx_asg, best.selection.bb_index,
                                best.selection.tx_assignment, best.selection.rx_assignment));
                if (better)
                {
                    best.mutual_info = mi;
                    best.selection.bb_index = b;
                    best.selection.tx_assignment = tx_asg;
                    best.selection.rx_assignment = rx_asg;
                }
            }
        } while (advance(rx_pos, rx_cands.size()));
    } while (advance(tx_pos, tx_cands.size()));

    return best;
}

std::vector<std::size_t> checked_candidates(std::span<const std::size_t> cands,
                                            std::size_t n_beams, const char *side)
{
    if (cands.empty())
        throw std::invalid_argument(std::string("restricted_search: empty ") + side +
                                    " candidate set");
    std::vector<std::size_t> v(cands.begin(), cands.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (v.back() >= n_beams)
        throw std::out_of_range(std::string("restricted_search: ") + side +
                                " candidate beyond codebook");
    return v;
}

} // namespace

SearchResult exhaustive_search(const MeasurementTensor &t, const BBCodebook &bb, double sigma2,
                               std::uint64_t cap)
{
    const std::uint64_t k = search_space_size(t.n_rx_beams(), t.n_rx_subarrays(),
                                              t.n_tx_beams(), t.n_tx_subarrays(), bb.size());
    if (k > cap)
        throw ResourceCapError("exhaustive_search: " + std::to_string(k) +
                               " combinations exceed cap " + std::to_string(cap));

    std::vector<std::size_t> rx(t.n_rx_beams()), tx(t.n_tx_beams());
    for (std::size_t b = 0; b < rx.size(); b++)
        rx[b] = b;
    for (std::size_t b = 0; b < tx.size(); b++)
        tx[b] = b;
    return enumerate_selections(t, bb, sigma2, rx, tx);
}

SearchResult restricted_search(const MeasurementTensor &t, const BBCodebook &bb, double sigma2,
                               std::span<const std::size_t> rx_candidates,
                               std::span<const std::size_t> tx_candidates)
{
    const auto rx = checked_candidates(rx_candidates, t.n_rx_beams(), "rx");
    const auto tx = checked_candidates(tx_candidates, t.n_tx_beams(), "tx");
    return enumerate_selections(t, bb, sigma2, rx, tx);
}

static std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t p, Rng &rng)
{
    // Partial Fisher-Yates. The modulo bias at 64 bits is far below anything a
    // simulation could resolve.
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; i++)
        idx[i] = i;
    for (std::size_t k = 0; k < p; k++)
    {
        const std::size_t j = k + std::size_t(rng.next_u64() % std::uint64_t(n - k));
        std::swap(idx[k], idx[j]);
    }
    idx.resize(p);
    return idx;
}

SearchResult random_subset_search(const MeasurementTensor &t, const BBCodebook &bb,
                                  double sigma2, std::size_t p, Rng &rng)
{
    if (p < 1 || p > t.n_rx_beams() || p > t.n_tx_beams())
        throw std::invalid_argument("random_subset_search: p outside codebook sizes");
    const auto rx = draw_without_replacement(t.n_rx_beams(), p, rng);
    const auto tx = draw_without_replacement(t.n_tx_beams(), p, rng);
    return restricted_search(t, bb, sigma2, rx, tx);
}

} // namespace mmbeam
