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
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mmbeam/geometry.hpp"

namespace mmbeam
{

// RF beam codebook: the steering directions each subarray may be pointed at.
struct RFCodebook
{
    std::vector<AnglePair> beams;

    std::size_t size() const { return beams.size(); }
};

// n_beams sector-bin midpoints covering [azimuth_lo, azimuth_hi] at a common
// elevation: beam i points at azimuth lo + width*(i + 1/2), width = span/n_beams.
RFCodebook uniform_codebook(double azimuth_lo, double azimuth_hi, std::size_t n_beams,
                            double elevation = 1.5707963267948966);

// One RF beam index per subarray.
using RFAssignment = std::vector<std::size_t>;

// Block-diagonal RF precoder/combiner, total_antennas x n_subarrays. Column s holds
// the unit-norm steering vector of beam assignment[s] in the rows of subarray s and
// zeros elsewhere, so F^H F = I.
arma::cx_mat rf_precoder_matrix(const SubarrayLayout &layout, const RFCodebook &codebook,
                                const RFAssignment &assignment);

// Baseband precoder codebook: candidate n_subarrays x n_layers matrices.
struct BBCodebook
{
    std::vector<arma::cx_mat> matrices;

    std::size_t size() const { return matrices.size(); }
    std::size_t n_layers() const { return matrices.empty() ? 0 : matrices[0].n_cols; }
};

// Built-in two-port rank-2 set (the 3GPP two-antenna downlink codebook), power
// normalized so trace(F^H F) = 1:
//   (1/sqrt(2)) I,  (1/2) [[1,1],[1,-1]],  (1/2) [[1,1],[j,-j]]
// Only (n_subarrays, n_layers) = (2, 2) is provided; anything else throws.
BBCodebook default_bb_codebook(std::size_t n_subarrays = 2, std::size_t n_layers = 2);

// RF codebook file: one "phi_deg,theta_deg" line per beam, '#' comments allowed.
void save_rf_codebook(std::ostream &os, const RFCodebook &cb);
RFCodebook load_rf_codebook(std::istream &is);

// BB codebook file: one matrix per block, one row per line, entries as
// comma-separated complex values in "re+imj" form; blank line between blocks.
void save_bb_codebook(std::ostream &os, const BBCodebook &cb);
BBCodebook load_bb_codebook(std::istream &is);

} // namespace mmbeam
