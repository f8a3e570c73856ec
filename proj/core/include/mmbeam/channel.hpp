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
#include <iosfwd>
#include <vector>

#include "mmbeam/geometry.hpp"
#include "mmbeam/rng.hpp"

namespace mmbeam
{

// Sparse multipath channel: a handful of plane-wave rays grouped into clusters.

struct Ray
{
    double gain_magnitude = 0.0; // |G|
    double initial_phase = 0.0;  // rad; absorbs any carrier delay phase (narrowband)
    double delay = 0.0;          // seconds relative to the first ray; metadata only
    double doppler_hz = 0.0;     // phase advances by 2*pi*doppler_hz*t
    AnglePair aoa;               // arrival direction at the receive panel
    AnglePair aod;               // departure direction at the transmit panel

    std::complex<double> gain() const { return std::polar(gain_magnitude, initial_phase); }
};

struct ChannelRealization
{
    std::vector<Ray> rays;
    SubarrayLayout tx;
    SubarrayLayout rx;
};

struct AngleInterval
{
    double lo = 0.0; // rad
    double hi = 0.0; // rad
};

// Knobs for the random channel generator. Cluster centers are drawn uniformly in
// the configured intervals; rays scatter around their cluster center with Laplacian
// offsets in azimuth and elevation; cluster powers decay exponentially with cluster
// index and the realized gain vector is rescaled so sum |G_r|^2 = 1 in every draw;
// dopplers are max_doppler_hz * cos(u) with u uniform.
struct ClusterConfig
{
    std::size_t n_clusters = 4;
    std::size_t rays_per_cluster = 5;
    AngleInterval aod_azimuth{-1.0471975511965977, 1.0471975511965977};  // +-60 deg
    AngleInterval aod_elevation{1.5707963267948966, 1.5707963267948966}; // pi/2
    AngleInterval aoa_azimuth{-1.5707963267948966, 1.5707963267948966};  // +-90 deg
    AngleInterval aoa_elevation{1.5707963267948966, 1.5707963267948966};
    double ray_spread = 0.08726646259971647; // Laplacian scale, rad (5 deg)
    double cluster_decay = 0.5;              // power ratio e^{-decay} between clusters
    double max_doppler_hz = 100.0;
};

// Draws one channel realization. Throws std::invalid_argument on a config with zero
// clusters or rays, negative spread or decay, or an inverted angle interval.
ChannelRealization draw_realization(const ClusterConfig &cfg, const SubarrayLayout &tx,
                                    const SubarrayLayout &rx, Rng &rng);

// Full antenna-domain channel, N_rx_ant x N_tx_ant:
// sqrt(N_tx_ant * N_rx_ant) * sum_r G_r * a_rx(aoa_r) a_tx(aod_r)^H
// with a_rx/a_tx the layout responses from array_response().
arma::cx_mat channel_matrix(const ChannelRealization &ch);

// Analog-combined coefficient seen on one (rx subarray, tx subarray) pair with the
// given RF beams, at time t. Per ray the static part is
//   |G_r| e^{j initial_phase} e^{+j gamma_rx(r,i)} e^{-j gamma_tx(r,j)}
//   * [sqrt(N_rx_sa) a(rx_beam)^H a(aoa_r)] * [sqrt(N_tx_sa) a(aod_r)^H a(tx_beam)]
// and the time dependence multiplies ray r by e^{j 2 pi doppler_hz_r t}.
std::complex<double> time_coefficient(const ChannelRealization &ch, double t,
                                      std::size_t rx_subarray, std::size_t tx_subarray,
                                      const AnglePair &rx_beam, const AnglePair &tx_beam);

// Text fixture format, one ray per line:
// magnitude,phase,delay,doppler,aoa_phi,aoa_theta,aod_phi,aod_theta
// Blank lines and lines starting with '#' are ignored on load.
void save_rays(std::ostream &os, const ChannelRealization &ch);
ChannelRealization load_rays(std::istream &is, const SubarrayLayout &tx,
                             const SubarrayLayout &rx);

} // namespace mmbeam
