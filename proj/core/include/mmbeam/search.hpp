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

#pragma once

#include <armadillo>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mmbeam/codebook.hpp"
#include "mmbeam/rng.hpp"
#include "mmbeam/sounding.hpp"

namespace mmbeam
{

// Joint precoder search over per-subarray RF beam assignments and the baseband
// codebook, scored by Gaussian-input mutual information on the beam-compressed
// channel.

struct PrecoderSelection
{
    std::size_t bb_index = 0;
    RFAssignment tx_assignment; // beam index per tx subarray
    RFAssignment rx_assignment; // beam index per rx subarray
};

struct SearchResult
{
    PrecoderSelection selection;
    double mutual_info = 0.0;        // bits/s/Hz of the winning combination
    std::uint64_t combinations = 0;  // number of combinations scored
};

// Thrown when a search would exceed its combination budget.
struct ResourceCapError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t default_search_cap = 1ULL << 24;

// Search space size n_rx_beams^n_rx_sa * n_tx_beams^n_tx_sa * n_bb with overflow
// checks (throws std::overflow_error).
std::uint64_t search_space_size(std::uint64_t n_rx_beams, std::uint64_t n_rx_subarrays,
                                std::uint64_t n_tx_beams, std::uint64_t n_tx_subarrays,
                                std::uint64_t n_bb);

// Beam-compressed channel for one selection: M(i,j) = t(i, j, rx[i], tx[j]), then
// H_c = M * F_bb, an n_rx_sa x n_layers matrix.
arma::cx_mat compressed_channel(const MeasurementTensor &t, const PrecoderSelection &sel,
                                const BBCodebook &bb);

// log2 det(I + H_c^H H_c / sigma2), evaluated through singular values as
// sum_k log2(1 + s_k^2 / sigma2). sigma2 must be positive.
double mutual_information(const arma::cx_mat &h_c, double sigma2);

// Full enumeration. Ties in mutual information resolve to the lexicographically
// smallest (bb_index, tx_assignment, rx_assignment), independent of enumeration
// order. Throws ResourceCapError if the combination count exceeds `cap`.
SearchResult exhaustive_search(const MeasurementTensor &t, const BBCodebook &bb, double sigma2,
                               std::uint64_t cap = default_search_cap);

// Enumeration restricted to candidate beam index subsets per side. Candidates must
// be nonempty and within the tensor's beam dimensions; duplicates are ignored.
// With full candidate sets this equals exhaustive_search exactly.
SearchResult restricted_search(const MeasurementTensor &t, const BBCodebook &bb, double sigma2,
                               std::span<const std::size_t> rx_candidates,
                               std::span<const std::size_t> tx_candidates);

// Baseline: restricted search over p beams drawn uniformly without replacement on
// each side from the given generator.
SearchResult random_subset_search(const MeasurementTensor &t, const BBCodebook &bb,
                                  double sigma2, std::size_t p, Rng &rng);

} // namespace mmbeam
