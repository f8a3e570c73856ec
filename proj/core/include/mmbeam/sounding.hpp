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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mmbeam/channel.hpp"
#include "mmbeam/codebook.hpp"
#include "mmbeam/geometry.hpp"

namespace mmbeam
{

// Beam-sounding measurements: the analog-combined coefficient for every
// (rx subarray, tx subarray, rx beam, tx beam) combination. Entry (i,j,bR,bT) is
// row i of F_rx^H H F_tx with beam bR driven on rx subarray i and beam bT on tx
// subarray j. Storage is a flat row-major array in index order (i, j, bR, bT).
class MeasurementTensor
{
  public:
    MeasurementTensor(std::size_t n_rx_sa, std::size_t n_tx_sa, std::size_t n_rx_beams,
                      std::size_t n_tx_beams);

    std::size_t n_rx_subarrays() const { return n_rx_sa_; }
    std::size_t n_tx_subarrays() const { return n_tx_sa_; }
    std::size_t n_rx_beams() const { return n_rx_beams_; }
    std::size_t n_tx_beams() const { return n_tx_beams_; }
    std::size_t n_entries() const { return data_.size(); }

    std::complex<double> &operator()(std::size_t i, std::size_t j, std::size_t br,
                                     std::size_t bt)
    {
        return data_[index(i, j, br, bt)];
    }
    const std::complex<double> &operator()(std::size_t i, std::size_t j, std::size_t br,
                                           std::size_t bt) const
    {
        return data_[index(i, j, br, bt)];
    }

    std::size_t index(std::size_t i, std::size_t j, std::size_t br, std::size_t bt) const
    {
        return ((i * n_tx_sa_ + j) * n_rx_beams_ + br) * n_tx_beams_ + bt;
    }

    std::vector<std::complex<double>> &data() { return data_; }
    const std::vector<std::complex<double>> &data() const { return data_; }

    // Variance of the additive noise accumulated on the entries (0 = noiseless).
    double noise_variance = 0.0;

  private:
    std::size_t n_rx_sa_, n_tx_sa_, n_rx_beams_, n_tx_beams_;
    std::vector<std::complex<double>> data_;
};

// Additive measurement noise: circularly symmetric complex Gaussian, variance
// sigma2 per entry, drawn in counter mode from the seed so the result does not
// depend on entry evaluation order.
struct NoiseModel
{
    double sigma2 = 0.0;
    std::uint64_t seed = 0;
};

// Definitional route: sound the assembled antenna-domain channel H with explicit
// RF combiner/precoder columns built from the codebooks. H must be
// rx.total_antennas() x tx.total_antennas().
MeasurementTensor measure_direct(const arma::cx_mat &h, const SubarrayLayout &tx,
                                 const SubarrayLayout &rx, const RFCodebook &tx_cb,
                                 const RFCodebook &rx_cb);

// Ray-domain route: accumulates per-ray products of subarray beam projections and
// subarray phase offsets without forming H. Entry (i,j,bR,bT) =
//   sum_r G_r e^{+j gamma_rx(r,i)} e^{-j gamma_tx(r,j)}
//         [sqrt(N_rx_sa) a(bR)^H a(aoa_r)] [sqrt(N_tx_sa) a(aod_r)^H a(bT)].
// Agrees with measure_direct up to rounding; both routes are kept as independent
// implementations on purpose.
MeasurementTensor measure_ray_expansion(const ChannelRealization &ch, const RFCodebook &tx_cb,
                                        const RFCodebook &rx_cb);

// Returns a copy of the tensor with one independent CN(0, sigma2) draw added per
// entry. Deterministic for a fixed seed.
MeasurementTensor add_noise(const MeasurementTensor &t, const NoiseModel &nm);

// Debug/fixture dump: "i,j,rx_beam,tx_beam,re,im" per entry, 0-based indices.
void write_tensor(std::ostream &os, const MeasurementTensor &t);

} // namespace mmbeam
