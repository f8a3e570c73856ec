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

#include "mmbeam/sounding.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mmbeam
{

MeasurementTensor::MeasurementTensor(std::size_t n_rx_sa, std::size_t n_tx_sa,
                                     std::size_t n_rx_beams, std::size_t n_tx_beams)
    : n_rx_sa_(n_rx_sa), n_tx_sa_(n_tx_sa), n_rx_beams_(n_rx_beams), n_tx_beams_(n_tx_beams)
{
    if (n_rx_sa < 1 || n_tx_sa < 1 || n_rx_beams < 1 || n_tx_beams < 1)
        throw std::invalid_argument("MeasurementTensor: all dimensions must be positive");
    data_.assign(n_rx_sa * n_tx_sa * n_rx_beams * n_tx_beams, {0.0, 0.0});
}

MeasurementTensor measure_direct(const arma::cx_mat &h, const SubarrayLayout &tx,
                                 const SubarrayLayout &rx, const RFCodebook &tx_cb,
                                 const RFCodebook &rx_cb)
{
    if (h.n_rows != rx.total_antennas() || h.n_cols != tx.total_antennas())
        throw std::invalid_argument("measure_direct: channel dimensions do not match layouts");

    const std::size_t per_rx = rx.subarray.size();
    const std::size_t per_tx = tx.subarray.size();

    // All candidate beam vectors, one column per beam.
    arma::cx_mat w_rx(per_rx, rx_cb.size());
    for (std::size_t b = 0; b < rx_cb.size(); b++)
        w_rx.col(b) = steering_vector(rx.subarray, rx_cb.beams[b]);
    arma::cx_mat w_tx(per_tx, tx_cb.size());
    for (std::size_t b = 0; b < tx_cb.size(); b++)
        w_tx.col(b) = steering_vector(tx.subarray, tx_cb.beams[b]);

    MeasurementTensor t(rx.n_subarrays(), tx.n_subarrays(), rx_cb.size(), tx_cb.size());
    for (std::size_t i = 0; i < rx.n_subarrays(); i++)
        for (std::size_t j = 0; j < tx.n_subarrays(); j++)
        {
            const arma::cx_mat block = h.submat(i * per_rx, j * per_tx, (i + 1) * per_rx - 1,
                                                (j + 1) * per_tx - 1);
            const arma::cx_mat slab = w_rx.t() * block * w_tx; // n_rx_beams x n_tx_beams
            for (std::size_t br = 0; br < rx_cb.size(); br++)
                for (std::size_t bt = 0; bt < tx_cb.size(); bt++)
                    t(i, j, br, bt) = slab(br, bt);
        }
    return t;
}

MeasurementTensor measure_ray_expansion(const ChannelRealization &ch, const RFCodebook &tx_cb,
                                        const RFCodebook &rx_cb)
{
    const std::size_t n_rays = ch.rays.size();
    const std::size_t n_rx_sa = ch.rx.n_subarrays();
    const std::size_t n_tx_sa = ch.tx.n_subarrays();

    // Per-ray beam projections and per-ray subarray phase factors.
    std::vector<std::complex<double>> rx_proj(n_rays * rx_cb.size());
    std::vector<std::complex<double>> tx_proj(n_rays * tx_cb.size());
    std::vector<std::complex<double>> rx_rot(n_rays * n_rx_sa);
    std::vector<std::complex<double>> tx_rot(n_rays * n_tx_sa);

    for (std::size_t r = 0; r < n_rays; r++)
    {
        const Ray &ray = ch.rays[r];
        for (std::size_t b = 0; b < rx_cb.size(); b++)
            rx_proj[r * rx_cb.size() + b] =
                inner_product_closed_form(ch.rx.subarray, rx_cb.beams[b], ray.aoa);
        for (std::size_t b = 0; b < tx_cb.size(); b++)
            tx_proj[r * tx_cb.size() + b] =
                inner_product_closed_form(ch.tx.subarray, ray.aod, tx_cb.beams[b]);
        for (std::size_t i = 0; i < n_rx_sa; i++)
            rx_rot[r * n_rx_sa + i] =
                std::polar(1.0, subarray_phase(ch.rx.offsets[i], ray.aoa));
        for (std::size_t j = 0; j < n_tx_sa; j++)
            tx_rot[r * n_tx_sa + j] =
                std::polar(1.0, -subarray_phase(ch.tx.offsets[j], ray.aod));
    }

    MeasurementTensor t(n_rx_sa, n_tx_sa, rx_cb.size(), tx_cb.size());
    for (std::size_t r = 0; r < n_rays; r++)
    {
        const std::complex<double> g = ch.rays[r].gain();
        for (std::size_t i = 0; i < n_rx_sa; i++)
            for (std::size_t j = 0; j < n_tx_sa; j++)
            {
                const std::complex<double> c = g * rx_rot[r * n_rx_sa + i] *
                                               tx_rot[r * n_tx_sa + j];
                for (std::size_t br = 0; br < rx_cb.size(); br++)
                {
                    const std::complex<double> cr = c * rx_proj[r * rx_cb.size() + br];
                    for (std::size_t bt = 0; bt < tx_cb.size(); bt++)
                        t(i, j, br, bt) += cr * tx_proj[r * tx_cb.size() + bt];
                }
            }
    }
    return t;
}

MeasurementTensor add_noise(const MeasurementTensor &t, const NoiseModel &nm)
{
    if (nm.sigma2 < 0.0)
        throw std::invalid_argument("add_noise: negative noise variance");

    MeasurementTensor out = t;
    if (nm.sigma2 == 0.0)
        return out;

    const double s = std::sqrt(nm.sigma2 / 2.0);
    for (std::size_t n = 0; n < out.n_entries(); n++)
    {
        double g0 = 0.0, g1 = 0.0;
        counter_normal_pair(nm.seed, n, g0, g1);
        out.data()[n] += std::complex<double>(s * g0, s * g1);
    }
    out.noise_variance = t.noise_variance + nm.sigma2;
    return out;
}

void write_tensor(std::ostream &os, const MeasurementTensor &t)
{
    os << "# i,j,rx_beam,tx_beam,re,im\n";
    os.precision(17);
    for (std::size_t i = 0; i < t.n_rx_subarrays(); i++)
        for (std::size_t j = 0; j < t.n_tx_subarrays(); j++)
            for (std::size_t br = 0; br < t.n_rx_beams(); br++)
                for (std::size_t bt = 0; bt < t.n_tx_beams(); bt++)
                {
                    const std::complex<double> &z = t(i, j, br, bt);
                    os << i << ',' << j << ',' << br << ',' << bt << ',' << z.real() << ','
                       << z.imag() << '\n';
                }
}

} // namespace mmbeam
