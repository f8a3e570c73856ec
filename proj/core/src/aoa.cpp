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

#include "mmbeam/aoa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mmbeam/rng.hpp"

namespace mmbeam
{

namespace
{

constexpr double corr_floor = 1e-12;
constexpr double merge_radius = two_pi / 360.0; // 1 degree

void check_triple(const SubarrayTriple &triple)
{
    if (!(triple.d_y > 0.0) || !(triple.d_z > 0.0))
        throw std::invalid_argument("subarray triple: displacements must be positive");
    if (triple.ref_index == triple.y_index || triple.ref_index == triple.z_index ||
        triple.y_index == triple.z_index)
        throw std::invalid_argument("subarray triple: indices must be distinct");
}

void check_triple_against_layout(const SubarrayTriple &triple, const SubarrayLayout &rx)
{
    check_triple(triple);
    const std::size_t n = rx.n_subarrays();
    if (triple.ref_index >= n || triple.y_index >= n || triple.z_index >= n)
        throw std::invalid_argument("subarray triple: index outside rx layout");

    const SubarrayOffset &ref = rx.offsets[triple.ref_index];
    const SubarrayOffset &oy = rx.offsets[triple.y_index];
    const SubarrayOffset &oz = rx.offsets[triple.z_index];
    constexpr double tol = 1e-12;
    if (std::abs(oy.d_y - ref.d_y - triple.d_y) > tol || std::abs(oy.d_z - ref.d_z) > tol)
        throw std::invalid_argument("subarray triple: y displacement does not match layout");
    if (std::abs(oz.d_z - ref.d_z - triple.d_z) > tol || std::abs(oz.d_y - ref.d_y) > tol)
        throw std::invalid_argument("subarray triple: z displacement does not match layout");
}

} // namespace

CorrelationStats accumulate_stats(const ChannelRealization &ch, const SubarrayTriple &triple,
                                  const RFCodebook &tx_cb, const RFCodebook &rx_cb,
                                  std::span<const double> times, const NoiseModel &noise,
                                  std::size_t tx_subarray)
{
    check_triple_against_layout(triple, ch.rx);
    if (tx_subarray >= ch.tx.n_subarrays())
        throw std::invalid_argument("accumulate_stats: tx subarray index out of range");
    if (times.empty())
        throw std::invalid_argument("accumulate_stats: need at least one sampling time");
    if (tx_cb.beams.empty() || rx_cb.beams.empty())
        throw std::invalid_argument("accumulate_stats: empty codebook");
    if (noise.sigma2 < 0.0)
        throw std::invalid_argument("accumulate_stats: negative noise variance");

    const std::size_t n_rays = ch.rays.size();
    const std::size_t n_tx = tx_cb.beams.size();
    const std::size_t n_rx = rx_cb.beams.size();
    const std::size_t n_times = times.size();

    // Per-ray pieces that do not depend on the beam pair. The reference-subarray
    // sample carries the full rotation; the displaced samples differ from it by
    // e^{+j subarray_phase(displacement, aoa)} only.
    std::vector<std::complex<double>> base(n_rays);   // gain rotated by ref rx / tx phases
    std::vector<std::complex<double>> rot_y(n_rays);  // extra rotation of the y sample
    std::vector<std::complex<double>> rot_z(n_rays);  // extra rotation of the z sample
    const SubarrayOffset off_y{triple.d_y, 0.0};
    const SubarrayOffset off_z{0.0, triple.d_z};
    for (std::size_t r = 0; r < n_rays; ++r)
    {
        const Ray &ray = ch.rays[r];
        const double phase = ray.initial_phase +
                             subarray_phase(ch.rx.offsets[triple.ref_index], ray.aoa) -
                             subarray_phase(ch.tx.offsets[tx_subarray], ray.aod);
        base[r] = std::polar(ray.gain_magnitude, phase);
        rot_y[r] = std::polar(1.0, subarray_phase(off_y, ray.aoa));
        rot_z[r] = std::polar(1.0, subarray_phase(off_z, ray.aoa));
    }

    std::vector<std::complex<double>> tx_proj(n_tx * n_rays);
    for (std::size_t j = 0; j < n_tx; ++j)
        for (std::size_t r = 0; r < n_rays; ++r)
            tx_proj[j * n_rays + r] =
                inner_product_closed_form(ch.tx.subarray, ch.rays[r].aod, tx_cb.beams[j]);
    std::vector<std::complex<double>> rx_proj(n_rx * n_rays);
    for (std::size_t k = 0; k < n_rx; ++k)
        for (std::size_t r = 0; r < n_rays; ++r)
            rx_proj[k * n_rays + r] =
                inner_product_closed_form(ch.rx.subarray, rx_cb.beams[k], ch.rays[r].aoa);

    std::vector<std::complex<double>> twiddle(n_rays * n_times);
    for (std::size_t r = 0; r < n_rays; ++r)
        for (std::size_t l = 0; l < n_times; ++l)
            twiddle[r * n_times + l] = std::polar(1.0, two_pi * ch.rays[r].doppler_hz * times[l]);

    CorrelationStats stats;
    stats.n_tx_beams = n_tx;
    stats.n_rx_beams = n_rx;
    stats.entries.resize(n_tx * n_rx);
    stats.instances = n_times;

    const double noise_scale = std::sqrt(noise.sigma2 / 2.0);
    std::vector<std::complex<double>> amp(n_rays);
    for (std::size_t j = 0; j < n_tx; ++j)
        for (std::size_t k = 0; k < n_rx; ++k)
        {
            for (std::size_t r = 0; r < n_rays; ++r)
                amp[r] = base[r] * tx_proj[j * n_rays + r] * rx_proj[k * n_rays + r];

            const std::size_t pair = j * n_rx + k;
            double p_acc = 0.0;
            std::complex<double> c21_acc{0, 0};
            std::complex<double> c31_acc{0, 0};
            for (std::size_t l = 0; l < n_times; ++l)
            {
                std::complex<double> z1{0, 0}, z2{0, 0}, z3{0, 0};
                for (std::size_t r = 0; r < n_rays; ++r)
                {
                    const std::complex<double> s = amp[r] * twiddle[r * n_times + l];
                    z1 += s;
                    z2 += s * rot_y[r];
                    z3 += s * rot_z[r];
                }
                if (noise_scale > 0.0)
                {
                    double g0 = 0.0, g1 = 0.0;
                    const std::uint64_t slot_base = (pair * 3) * n_times;
                    counter_normal_pair(noise.seed, slot_base + l, g0, g1);
                    z1 += noise_scale * std::complex<double>(g0, g1);
                    counter_normal_pair(noise.seed, slot_base + n_times + l, g0, g1);
                    z2 += noise_scale * std::complex<double>(g0, g1);
                    counter_normal_pair(noise.seed, slot_base + 2 * n_times + l, g0, g1);
                    z3 += noise_scale * std::complex<double>(g0, g1);
                }
                p_acc += std::norm(z1);
                c21_acc += z2 * std::conj(z1);
                c31_acc += z3 * std::conj(z1);
            }
            CorrelationEntry &e = stats.entries[pair];
            e.p_avg = p_acc / static_cast<double>(n_times);
            e.c21 = c21_acc / static_cast<double>(n_times);
            e.c31 = c31_acc / static_cast<double>(n_times);
        }
    return stats;
}

CorrelationStats analytic_stats(const ChannelRealization &ch, const SubarrayTriple &triple,
                                const RFCodebook &tx_cb, const RFCodebook &rx_cb,
                                double sigma2)
{
    check_triple(triple);
    if (tx_cb.beams.empty() || rx_cb.beams.empty())
        throw std::invalid_argument("analytic_stats: empty codebook");
    if (sigma2 < 0.0)
        throw std::invalid_argument("analytic_stats: negative noise variance");

    const std::size_t n_rays = ch.rays.size();
    const std::size_t n_tx = tx_cb.beams.size();
    const std::size_t n_rx = rx_cb.beams.size();

    CorrelationStats stats;
    stats.n_tx_beams = n_tx;
    stats.n_rx_beams = n_rx;
    stats.entries.resize(n_tx * n_rx);
    stats.instances = 0;
    for (std::size_t a = 0; a < n_rays && !stats.degenerate_doppler; ++a)
        for (std::size_t b = a + 1; b < n_rays; ++b)
            if (ch.rays[a].doppler_hz == ch.rays[b].doppler_hz)
            {
                stats.degenerate_doppler = true;
                break;
            }

    const SubarrayOffset off_y{triple.d_y, 0.0};
    const SubarrayOffset off_z{0.0, triple.d_z};
    std::vector<std::complex<double>> rot_y(n_rays), rot_z(n_rays);
    std::vector<double> tx_pow(n_tx * n_rays), rx_pow(n_rx * n_rays);
    for (std::size_t r = 0; r < n_rays; ++r)
    {
        rot_y[r] = std::polar(1.0, subarray_phase(off_y, ch.rays[r].aoa));
        rot_z[r] = std::polar(1.0, subarray_phase(off_z, ch.rays[r].aoa));
    }
    for (std::size_t j = 0; j < n_tx; ++j)
        for (std::size_t r = 0; r < n_rays; ++r)
            tx_pow[j * n_rays + r] = std::norm(
                inner_product_closed_form(ch.tx.subarray, ch.rays[r].aod, tx_cb.beams[j]));
    for (std::size_t k = 0; k < n_rx; ++k)
        for (std::size_t r = 0; r < n_rays; ++r)
            rx_pow[k * n_rays + r] = std::norm(
                inner_product_closed_form(ch.rx.subarray, rx_cb.beams[k], ch.rays[r].aoa));

    for (std::size_t j = 0; j < n_tx; ++j)
        for (std::size_t k = 0; k < n_rx; ++k)
        {
            CorrelationEntry &e = stats.entries[j * n_rx + k];
            double p = sigma2;
            std::complex<double> c21{0, 0}, c31{0, 0};
            for (std::size_t r = 0; r < n_rays; ++r)
            {
                const double a2 = ch.rays[r].gain_magnitude * ch.rays[r].gain_magnitude *
                                  tx_pow[j * n_rays + r] * rx_pow[k * n_rays + r];
                p += a2;
                c21 += a2 * rot_y[r];
                c31 += a2 * rot_z[r];
            }
            e.p_avg = p;
            e.c21 = c21;
            e.c31 = c31;
        }
    return stats;
}

CorrelationStats average_stats(std::span<const CorrelationStats> parts)
{
    if (parts.empty())
        throw std::invalid_argument("average_stats: no statistics to combine");
    CorrelationStats out = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i)
    {
        const CorrelationStats &s = parts[i];
        if (s.n_tx_beams != out.n_tx_beams || s.n_rx_beams != out.n_rx_beams ||
            s.instances != out.instances)
            throw std::invalid_argument("average_stats: mismatched statistics shapes");
        for (std::size_t e = 0; e < out.entries.size(); ++e)
        {
            out.entries[e].p_avg += s.entries[e].p_avg;
            out.entries[e].c21 += s.entries[e].c21;
            out.entries[e].c31 += s.entries[e].c31;
        }
        out.degenerate_doppler = out.degenerate_doppler || s.degenerate_doppler;
    }
    const double inv = 1.0 / static_cast<double>(parts.size());
    for (CorrelationEntry &e : out.entries)
    {
        e.p_avg *= inv;
        e.c21 *= inv;
        e.c31 *= inv;
    }
    return out;
}

double unwrap_phase(double wrapped, double expected, double period)
{
    if (!(period > 0.0))
        throw std::invalid_argument("unwrap_phase: period must be positive");
    if (std::abs(wrapped) > period / 2.0 + 1e-9)
        throw std::invalid_argument("unwrap_phase: wrapped phase outside principal interval");
    return wrapped + period * std::round((expected - wrapped) / period);
}

std::vector<std::pair<std::size_t, std::size_t>> top_pairs(const CorrelationStats &stats,
                                                           std::size_t p)
{
    const std::size_t n_pairs = stats.n_tx_beams * stats.n_rx_beams;
    if (stats.entries.size() != n_pairs || n_pairs == 0)
        throw std::invalid_argument("top_pairs: inconsistent statistics dimensions");
    if (p == 0 || p > n_pairs)
        throw std::invalid_argument("top_pairs: p must be in [1, n_tx_beams * n_rx_beams]");

    std::vector<std::size_t> order(n_pairs);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (stats.entries[a].p_avg != stats.entries[b].p_avg)
            return stats.entries[a].p_avg > stats.entries[b].p_avg;
        return a < b;
    });

    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(p);
    for (std::size_t i = 0; i < p; ++i)
        out.emplace_back(order[i] / stats.n_rx_beams, order[i] % stats.n_rx_beams);
    return out;
}

AoAReport estimate_aoas(const CorrelationStats &stats, const SubarrayTriple &triple,
                        const RFCodebook &rx_cb, std::size_t p)
{
    check_triple(triple);
    if (rx_cb.beams.size() != stats.n_rx_beams)
        throw std::invalid_argument("estimate_aoas: codebook size does not match statistics");

    const double kd_y = two_pi * triple.d_y;
    const double kd_z = two_pi * triple.d_z;

    AoAReport report;
    for (const auto &[j, k] : top_pairs(stats, p))
    {
        const CorrelationEntry &e = stats.at(j, k);
        if (std::abs(e.c31) < corr_floor || std::abs(e.c21) < corr_floor)
        {
            ++report.skipped;
            continue;
        }

        const double expected_z = kd_z * std::cos(rx_cb.beams[k].theta);
        const double cos_theta = unwrap_phase(std::arg(e.c31), expected_z) / kd_z;
        if (std::abs(cos_theta) > 1.0)
        {
            ++report.discarded;
            continue;
        }
        const double theta = std::acos(cos_theta);

        const double denom = kd_y * std::sin(theta);
        if (denom < corr_floor)
        {
            ++report.discarded; // azimuth is unobservable at the poles
            continue;
        }
        const double expected_y = denom * std::sin(rx_cb.beams[k].phi);
        const double sin_phi = unwrap_phase(std::arg(e.c21), expected_y) / denom;
        if (std::abs(sin_phi) > 1.0)
        {
            ++report.discarded;
            continue;
        }
        const AnglePair dir{std::asin(sin_phi), theta};

        const bool duplicate = std::any_of(
            report.estimates.begin(), report.estimates.end(),
            [&](const AoAEstimate &acc) { return angular_distance(dir, acc.direction) < merge_radius; });
        if (duplicate)
        {
            ++report.merged;
            continue;
        }
        report.estimates.push_back(AoAEstimate{dir, j, k, e.p_avg});
    }

    if (report.estimates.empty())
        throw std::runtime_error("estimate_aoas: no estimate survived (" +
                                 std::to_string(report.discarded) + " discarded, " +
                                 std::to_string(report.skipped) + " skipped)");
    return report;
}

std::vector<AnglePair> steer_candidates(std::span<const AoAEstimate> estimates)
{
    if (estimates.empty())
        throw std::invalid_argument("steer_candidates: no estimates");
    std::vector<AnglePair> out;
    out.reserve(estimates.size());
    for (const AoAEstimate &e : estimates)
        out.push_back(e.direction);
    return out;
}

void write_estimates_csv(std::ostream &os, std::span<const AoAEstimate> estimates)
{
    constexpr double rad2deg = 360.0 / two_pi;
    os << "m,tx_beam,rx_beam,power,theta_deg,phi_deg\n";
    os.precision(12);
    for (std::size_t m = 0; m < estimates.size(); ++m)
    {
        const AoAEstimate &e = estimates[m];
        os << m << ',' << e.tx_beam << ',' << e.rx_beam << ',' << e.power << ','
           << e.direction.theta * rad2deg << ',' << e.direction.phi * rad2deg << '\n';
    }
}

} // namespace mmbeam
