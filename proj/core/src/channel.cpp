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

#include "mmbeam/channel.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mmbeam
{

static void check_interval(const AngleInterval &iv, const char *what)
{
    if (!(iv.lo <= iv.hi))
        throw std::invalid_argument(std::string("ClusterConfig: inverted ") + what + " interval");
}

static double wrap_azimuth(double phi)
{
    while (phi > std::numbers::pi)
        phi -= two_pi;
    while (phi <= -std::numbers::pi)
        phi += two_pi;
    return phi;
}

ChannelRealization draw_realization(const ClusterConfig &cfg, const SubarrayLayout &tx,
                                    const SubarrayLayout &rx, Rng &rng)
{
    if (cfg.n_clusters < 1)
        throw std::invalid_argument("ClusterConfig: need at least one cluster");
    if (cfg.rays_per_cluster < 1)
        throw std::invalid_argument("ClusterConfig: need at least one ray per cluster");
    if (cfg.ray_spread < 0.0)
        throw std::invalid_argument("ClusterConfig: negative ray spread");
    if (cfg.cluster_decay < 0.0)
        throw std::invalid_argument("ClusterConfig: negative cluster decay");
    if (cfg.max_doppler_hz < 0.0)
        throw std::invalid_argument("ClusterConfig: negative max doppler");
    check_interval(cfg.aod_azimuth, "aod azimuth");
    check_interval(cfg.aod_elevation, "aod elevation");
    check_interval(cfg.aoa_azimuth, "aoa azimuth");
    check_interval(cfg.aoa_elevation, "aoa elevation");

    ChannelRealization ch{{}, tx, rx};
    ch.rays.reserve(cfg.n_clusters * cfg.rays_per_cluster);

    // Expected per-ray power: exponential decay across clusters, flat within one,
    // normalized to unit total energy.
    std::vector<double> share(cfg.n_clusters);
    double total_share = 0.0;
    for (std::size_t c = 0; c < cfg.n_clusters; c++)
        total_share += share[c] = std::exp(-cfg.cluster_decay * double(c));

    for (std::size_t c = 0; c < cfg.n_clusters; c++)
    {
        const AnglePair aod_center{rng.uniform(cfg.aod_azimuth.lo, cfg.aod_azimuth.hi),
                                   rng.uniform(cfg.aod_elevation.lo, cfg.aod_elevation.hi)};
        const AnglePair aoa_center{rng.uniform(cfg.aoa_azimuth.lo, cfg.aoa_azimuth.hi),
                                   rng.uniform(cfg.aoa_elevation.lo, cfg.aoa_elevation.hi)};
        const double ray_power = share[c] / (total_share * double(cfg.rays_per_cluster));
        const double rayleigh_sigma = std::sqrt(ray_power / 2.0);

        for (std::size_t k = 0; k < cfg.rays_per_cluster; k++)
        {
            Ray r;
            r.aod.phi = wrap_azimuth(aod_center.phi + rng.laplace(cfg.ray_spread));
            r.aod.theta = std::clamp(aod_center.theta + rng.laplace(cfg.ray_spread), 0.0,
                                     std::numbers::pi);
            r.aoa.phi = wrap_azimuth(aoa_center.phi + rng.laplace(cfg.ray_spread));
            r.aoa.theta = std::clamp(aoa_center.theta + rng.laplace(cfg.ray_spread), 0.0,
                                     std::numbers::pi);
            r.gain_magnitude = rng.rayleigh(rayleigh_sigma);
            r.initial_phase = rng.uniform(0.0, two_pi);
            r.doppler_hz = cfg.max_doppler_hz * std::cos(rng.uniform(0.0, two_pi));
            r.delay = 0.0;
            ch.rays.push_back(r);
        }
    }

    // Rescale the realized gains to unit total energy so every draw satisfies
    // sum |G_r|^2 = 1 exactly (a single ray then has |G| = 1).
    double energy = 0.0;
    for (const Ray &r : ch.rays)
        energy += r.gain_magnitude * r.gain_magnitude;
    const double scale = 1.0 / std::sqrt(energy);
    for (Ray &r : ch.rays)
        r.gain_magnitude *= scale;

    return ch;
}

arma::cx_mat channel_matrix(const ChannelRealization &ch)
{
    const std::size_t n_rx = ch.rx.total_antennas();
    const std::size_t n_tx = ch.tx.total_antennas();
    arma::cx_mat h(n_rx, n_tx, arma::fill::zeros);
    for (const Ray &r : ch.rays)
    {
        const arma::cx_vec a_rx = array_response(ch.rx, r.aoa);
        const arma::cx_vec a_tx = array_response(ch.tx, r.aod);
        h += r.gain() * (a_rx * a_tx.t());
    }
    return std::sqrt(double(n_rx * n_tx)) * h;
}

std::complex<double> time_coefficient(const ChannelRealization &ch, double t,
                                      std::size_t rx_subarray, std::size_t tx_subarray,
                                      const AnglePair &rx_beam, const AnglePair &tx_beam)
{
    if (rx_subarray >= ch.rx.n_subarrays() || tx_subarray >= ch.tx.n_subarrays())
        throw std::out_of_range("time_coefficient: subarray index out of range");

    std::complex<double> acc(0.0, 0.0);
    for (const Ray &r : ch.rays)
    {
        const double gamma_rx = subarray_phase(ch.rx.offsets[rx_subarray], r.aoa);
        const double gamma_tx = subarray_phase(ch.tx.offsets[tx_subarray], r.aod);
        const std::complex<double> rx_proj =
            inner_product_closed_form(ch.rx.subarray, rx_beam, r.aoa);
        const std::complex<double> tx_proj =
            inner_product_closed_form(ch.tx.subarray, r.aod, tx_beam);
        const double phase = r.initial_phase + two_pi * r.doppler_hz * t + gamma_rx - gamma_tx;
        acc += std::polar(r.gain_magnitude, phase) * rx_proj * tx_proj;
    }
    return acc;
}

void save_rays(std::ostream &os, const ChannelRealization &ch)
{
    os << "# magnitude,phase,delay,doppler,aoa_phi,aoa_theta,aod_phi,aod_theta\n";
    os.precision(17);
    for (const Ray &r : ch.rays)
        os << r.gain_magnitude << ',' << r.initial_phase << ',' << r.delay << ','
           << r.doppler_hz << ',' << r.aoa.phi << ',' << r.aoa.theta << ',' << r.aod.phi << ','
           << r.aod.theta << '\n';
}

ChannelRealization load_rays(std::istream &is, const SubarrayLayout &tx,
                             const SubarrayLayout &rx)
{
    ChannelRealization ch{{}, tx, rx};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line))
    {
        line_no++;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        double f[8];
        char sep = ',';
        bool ok = true;
        for (int i = 0; i < 8 && ok; i++)
        {
            if (i > 0)
            {
                ls >> sep;
                ok = ok && sep == ',';
            }
            ok = ok && bool(ls >> f[i]);
        }
        if (!ok)
            throw std::runtime_error("load_rays: malformed line " + std::to_string(line_no));
        Ray r;
        r.gain_magnitude = f[0];
        r.initial_phase = f[1];
        r.delay = f[2];
        r.doppler_hz = f[3];
        r.aoa = {f[4], f[5]};
        r.aod = {f[6], f[7]};
        if (r.gain_magnitude < 0.0)
            throw std::runtime_error("load_rays: negative magnitude at line " +
                                     std::to_string(line_no));
        if (r.delay < 0.0)
            throw std::runtime_error("load_rays: negative delay at line " +
                                     std::to_string(line_no));
        ch.rays.push_back(r);
    }
    return ch;
}

} // namespace mmbeam
