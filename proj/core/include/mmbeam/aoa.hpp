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

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mmbeam/channel.hpp"
#include "mmbeam/codebook.hpp"
#include "mmbeam/sounding.hpp"

namespace mmbeam
{

// Arrival-direction estimation from cross-subarray correlations. Three receive
// subarrays are used: a reference, one displaced along y, one displaced along z.
// For a single ray the displaced samples are phase-rotated copies of the reference
// ( z_y = e^{+j 2 pi d_y sin(theta) sin(phi)} z_ref, z_z = e^{+j 2 pi d_z cos(theta)} z_ref ),
// and distinct per-ray doppler rates make cross-ray terms average out over time, so
// the correlation phases expose the per-ray angles.

struct SubarrayTriple
{
    std::size_t ref_index = 0; // reference subarray in the rx layout
    std::size_t y_index = 1;   // subarray displaced by (d_y, 0)
    std::size_t z_index = 2;   // subarray displaced by (0, d_z)
    double d_y = 0.5;          // wavelengths, > 0
    double d_z = 0.5;          // wavelengths, > 0
};

struct CorrelationEntry
{
    double p_avg = 0.0;              // mean |z_ref|^2
    std::complex<double> c21{0, 0};  // mean z_y z_ref^*
    std::complex<double> c31{0, 0};  // mean z_z z_ref^*
};

// One entry per (tx beam, rx beam) pair, tx-major.
struct CorrelationStats
{
    std::size_t n_tx_beams = 0;
    std::size_t n_rx_beams = 0;
    std::vector<CorrelationEntry> entries;
    std::size_t instances = 0;       // sample count; 0 marks exact expectations
    bool degenerate_doppler = false; // analytic route: two rays shared a doppler rate

    CorrelationEntry &at(std::size_t tx_beam, std::size_t rx_beam)
    {
        return entries[tx_beam * n_rx_beams + rx_beam];
    }
    const CorrelationEntry &at(std::size_t tx_beam, std::size_t rx_beam) const
    {
        return entries[tx_beam * n_rx_beams + rx_beam];
    }
};

// Empirical correlations from sampled coefficients at the given times, with one
// independent CN(0, sigma2) noise draw per (beam pair, subarray, time). The triple
// indices must exist in ch.rx and their offsets must match the stated displacements
// exactly. Sounding transmits from tx subarray `tx_subarray` only.
CorrelationStats accumulate_stats(const ChannelRealization &ch, const SubarrayTriple &triple,
                                  const RFCodebook &tx_cb, const RFCodebook &rx_cb,
                                  std::span<const double> times, const NoiseModel &noise,
                                  std::size_t tx_subarray = 0);

// Exact expectations of the same statistics under distinct per-ray doppler rates:
//   p_avg = sum_r |A_r|^2 + sigma2
//   c21   = sum_r |A_r|^2 e^{j 2 pi d_y sin(theta_r) sin(phi_r)}
//   c31   = sum_r |A_r|^2 e^{j 2 pi d_z cos(theta_r)}
// with |A_r| the ray amplitude seen through the beam pair. If two rays share a
// doppler rate the cross terms would not vanish; the no-cross-term value is still
// returned and degenerate_doppler is set. Only the triple displacements are used.
CorrelationStats analytic_stats(const ChannelRealization &ch, const SubarrayTriple &triple,
                                const RFCodebook &tx_cb, const RFCodebook &rx_cb,
                                double sigma2);

// Elementwise average of statistics gathered from several triples with identical
// displacement geometry (same dims, same instance count). The degenerate-doppler
// flag is the OR of the parts.
CorrelationStats average_stats(std::span<const CorrelationStats> parts);

// Nearest unwrapping of a principal-value phase toward an expected value:
// wrapped + period * round((expected - wrapped) / period). |result - expected| is
// at most period/2. wrapped must lie in [-period/2, period/2].
double unwrap_phase(double wrapped, double expected, double period = two_pi);

struct AoAEstimate
{
    AnglePair direction;      // estimated (phi, theta)
    std::size_t tx_beam = 0;  // pair that produced the estimate
    std::size_t rx_beam = 0;
    double power = 0.0;       // the pair's p_avg
};

struct AoAReport
{
    std::vector<AoAEstimate> estimates; // strongest first, at most p
    std::size_t discarded = 0;          // arccos/arcsin argument out of [-1, 1]
    std::size_t skipped = 0;            // correlation magnitude below 1e-12
    std::size_t merged = 0;             // within 1 degree of an accepted estimate
};

// Estimation from the p strongest beam pairs (by p_avg, ties toward lower beam
// indices). Elevation comes from arg(c31) unwrapped toward the pair's rx beam
// elevation; azimuth from arg(c21) unwrapped toward the beam azimuth at the
// estimated elevation. Estimates within 1 degree of a stronger accepted estimate
// are merged. Throws std::runtime_error if every pair was discarded or skipped.
AoAReport estimate_aoas(const CorrelationStats &stats, const SubarrayTriple &triple,
                        const RFCodebook &rx_cb, std::size_t p);

// The strongest p (tx_beam, rx_beam) pairs by p_avg, for callers that need the
// ranking itself.
std::vector<std::pair<std::size_t, std::size_t>> top_pairs(const CorrelationStats &stats,
                                                           std::size_t p);

// Candidate steering directions for a restricted search, one per estimate.
std::vector<AnglePair> steer_candidates(std::span<const AoAEstimate> estimates);

// CSV dump: "m,tx_beam,rx_beam,power,theta_deg,phi_deg", strongest first.
void write_estimates_csv(std::ostream &os, std::span<const AoAEstimate> estimates);

} // namespace mmbeam
