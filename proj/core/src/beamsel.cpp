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

#include "mmbeam/beamsel.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <ostream>
#include <stdexcept>

namespace mmbeam
{

std::vector<double> effective_power_rx(const MeasurementTensor &t)
{
    std::vector<double> p(t.n_rx_beams(), 0.0);
    for (std::size_t i = 0; i < t.n_rx_subarrays(); i++)
        for (std::size_t j = 0; j < t.n_tx_subarrays(); j++)
            for (std::size_t br = 0; br < t.n_rx_beams(); br++)
                for (std::size_t bt = 0; bt < t.n_tx_beams(); bt++)
                    p[br] += std::norm(t(i, j, br, bt));
    const double scale =
        1.0 / double(t.n_rx_subarrays() * t.n_tx_subarrays() * t.n_tx_beams());
    for (double &v : p)
        v *= scale;
    return p;
}

std::vector<double> effective_power_tx(const MeasurementTensor &t)
{
    std::vector<double> p(t.n_tx_beams(), 0.0);
    for (std::size_t i = 0; i < t.n_rx_subarrays(); i++)
        for (std::size_t j = 0; j < t.n_tx_subarrays(); j++)
            for (std::size_t br = 0; br < t.n_rx_beams(); br++)
                for (std::size_t bt = 0; bt < t.n_tx_beams(); bt++)
                    p[bt] += std::norm(t(i, j, br, bt));
    const double scale =
        1.0 / double(t.n_rx_subarrays() * t.n_tx_subarrays() * t.n_rx_beams());
    for (double &v : p)
        v *= scale;
    return p;
}

std::vector<std::size_t> top_p(std::span<const double> powers, std::size_t p)
{
    if (p < 1 || p > powers.size())
        throw std::invalid_argument("top_p: p must be in [1, powers.size()]");
    std::vector<std::size_t> idx(powers.size());
    for (std::size_t i = 0; i < idx.size(); i++)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (powers[a] != powers[b])
            return powers[a] > powers[b];
        return a < b; // ties toward the lower index
    });
    idx.resize(p);
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace
{

bool same_direction(const AnglePair &a, const AnglePair &b)
{
    return std::abs(a.phi - b.phi) <= 1e-12 && std::abs(a.theta - b.theta) <= 1e-12;
}

// Maps each codebook beam to the rays it points at exactly (usually one or none).
std::vector<std::vector<std::size_t>> match_beams(const RFCodebook &cb,
                                                  const std::vector<Ray> &rays, bool use_aoa)
{
    std::vector<std::vector<std::size_t>> hits(cb.size());
    for (std::size_t b = 0; b < cb.size(); b++)
        for (std::size_t r = 0; r < rays.size(); r++)
            if (same_direction(cb.beams[b], use_aoa ? rays[r].aoa : rays[r].aod))
                hits[b].push_back(r);
    return hits;
}

} // namespace

Lemma1Report lemma1_probe(const std::vector<Ray> &rays, const RFCodebook &rx_cb,
                          const RFCodebook &tx_cb, const Lemma1Config &cfg)
{
    if (rays.empty())
        throw std::invalid_argument("lemma1_probe: need at least one ray");
    if (cfg.per_subarray_antennas.empty())
        throw std::invalid_argument("lemma1_probe: need at least one antenna count");
    if (cfg.n_rx_subarrays < 1 || cfg.n_tx_subarrays < 1)
        throw std::invalid_argument("lemma1_probe: need at least one subarray per side");

    const auto rx_hits = match_beams(rx_cb, rays, true);
    const auto tx_hits = match_beams(tx_cb, rays, false);

    // Every ray must be reachable exactly, and there must be unmatched beams to
    // compare against.
    for (std::size_t r = 0; r < rays.size(); r++)
    {
        bool in_rx = false, in_tx = false;
        for (std::size_t b = 0; b < rx_cb.size() && !in_rx; b++)
            in_rx = same_direction(rx_cb.beams[b], rays[r].aoa);
        for (std::size_t b = 0; b < tx_cb.size() && !in_tx; b++)
            in_tx = same_direction(tx_cb.beams[b], rays[r].aod);
        if (!in_rx)
            throw std::invalid_argument("lemma1_probe: rx codebook is missing a ray arrival");
        if (!in_tx)
            throw std::invalid_argument("lemma1_probe: tx codebook is missing a ray departure");
    }
    if (std::all_of(rx_hits.begin(), rx_hits.end(),
                    [](const auto &h) { return !h.empty(); }))
        throw std::invalid_argument("lemma1_probe: rx codebook has no off-path beams");

    Lemma1Report report;
    for (std::size_t n : cfg.per_subarray_antennas)
    {
        const auto side = std::size_t(std::llround(std::sqrt(double(n))));
        if (side * side != n)
            throw std::invalid_argument("lemma1_probe: antenna counts must be perfect squares");

        const double spacing = 0.5;
        const PlanarArray panel(side, side, spacing);
        auto offsets = [&](std::size_t count) {
            std::vector<SubarrayOffset> off(count);
            for (std::size_t s = 0; s < count; s++)
                off[s] = {double(s) * double(side) * spacing, 0.0};
            return off;
        };
        const SubarrayLayout rx_layout(panel, offsets(cfg.n_rx_subarrays));
        const SubarrayLayout tx_layout(panel, offsets(cfg.n_tx_subarrays));

        const ChannelRealization ch{rays, tx_layout, rx_layout};
        MeasurementTensor t = measure_ray_expansion(ch, tx_cb, rx_cb);
        if (cfg.sigma2 > 0.0)
            t = add_noise(t, NoiseModel{cfg.sigma2, derive_key(cfg.noise_seed, n)});

        const std::vector<double> p_rx = effective_power_rx(t);
        const std::vector<double> p_tx = effective_power_tx(t);

        Lemma1SizeSummary sum;
        sum.n = n;
        sum.min_matched = arma::datum::inf;
        sum.max_unmatched = 0.0;

        std::vector<std::pair<double, double>> matched; // (p_eff, total |G|^2 at that beam)
        for (std::size_t b = 0; b < rx_cb.size(); b++)
        {
            const bool is_matched = !rx_hits[b].empty();
            report.rows.push_back({n, is_matched ? "rx_aoa" : "rx_off", b, p_rx[b]});
            if (is_matched)
            {
                double gain2 = 0.0;
                for (std::size_t r : rx_hits[b])
                    gain2 += rays[r].gain_magnitude * rays[r].gain_magnitude;
                matched.push_back({p_rx[b], gain2});
                sum.min_matched = std::min(sum.min_matched, p_rx[b]);
            }
            else
                sum.max_unmatched = std::max(sum.max_unmatched, p_rx[b]);
        }
        for (std::size_t b = 0; b < tx_cb.size(); b++)
            report.rows.push_back({n, tx_hits[b].empty() ? "tx_off" : "tx_aod", b, p_tx[b]});

        sum.dominance = sum.min_matched / sum.max_unmatched;

        // Sorting matched beams by effective power must reproduce the gain order.
        std::sort(matched.begin(), matched.end(),
                  [](const auto &a, const auto &b) { return a.first > b.first; });
        sum.ordering_matches_gains = true;
        for (std::size_t k = 1; k < matched.size(); k++)
            if (matched[k - 1].second < matched[k].second)
                sum.ordering_matches_gains = false;

        report.summary.push_back(sum);
    }
    return report;
}

void write_probe_csv(std::ostream &os, const Lemma1Report &report)
{
    os << "n,beam_kind,beam_index,p_eff\n";
    os.precision(12);
    for (const Lemma1Row &row : report.rows)
        os << row.n << ',' << row.kind << ',' << row.beam << ',' << row.p_eff << '\n';
}

namespace
{

// Direction cosines along the two array axes.
double u_y(const AnglePair &d) { return std::sin(d.theta) * std::sin(d.phi); }
double u_z(const AnglePair &d) { return std::cos(d.theta); }

bool axis_separated(const AnglePair &beam, const std::vector<AnglePair> &paths, double min_sep)
{
    for (const AnglePair &p : paths)
        if (std::abs(u_y(beam) - u_y(p)) < min_sep || std::abs(u_z(beam) - u_z(p)) < min_sep)
            return false;
    return true;
}

} // namespace

ProbeInstance random_probe_instance(Rng &rng)
{
    constexpr double deg = two_pi / 360.0;
    constexpr double axis_sep = 0.15; // direction-cosine units
    constexpr double min_path_sep = 25.0 * deg;

    auto draw_dir = [&](double az_span_deg, double th_lo_deg, double th_hi_deg) {
        return AnglePair{rng.uniform(-az_span_deg * deg, az_span_deg * deg),
                         rng.uniform(th_lo_deg * deg, th_hi_deg * deg)};
    };
    auto draw_separated = [&](std::vector<AnglePair> &acc) {
        for (int attempt = 0; attempt < 10000; ++attempt)
        {
            const AnglePair c = draw_dir(50.0, 60.0, 120.0);
            bool ok = true;
            for (const AnglePair &prev : acc)
                if (angular_distance(c, prev) < min_path_sep)
                {
                    ok = false;
                    break;
                }
            if (ok)
            {
                acc.push_back(c);
                return;
            }
        }
        throw std::runtime_error("random_probe_instance: failed to separate directions");
    };

    std::vector<AnglePair> aoas, aods;
    for (int r = 0; r < 3; ++r)
        draw_separated(aoas);
    for (int r = 0; r < 3; ++r)
        draw_separated(aods);

    ProbeInstance out;
    double mag = 1.0;
    for (int r = 0; r < 3; ++r)
    {
        Ray ray;
        ray.gain_magnitude = mag;
        ray.initial_phase = rng.uniform(0.0, two_pi);
        ray.aoa = aoas[static_cast<std::size_t>(r)];
        ray.aod = aods[static_cast<std::size_t>(r)];
        out.rays.push_back(ray);
        mag *= std::pow(10.0, -(3.0 + rng.uniform(0.0, 2.0)) / 20.0);
    }

    auto build_cb = [&](const std::vector<AnglePair> &paths, std::size_t n_off,
                        std::initializer_list<double> ring_deltas_deg) {
        RFCodebook cb;
        cb.beams = paths;
        std::vector<AnglePair> off;
        for (const AnglePair &c : paths)
            for (const double dd : ring_deltas_deg)
            {
                const double d = dd * deg;
                for (const AnglePair cand : {AnglePair{c.phi + d, c.theta + d},
                                             AnglePair{c.phi + d, c.theta - d},
                                             AnglePair{c.phi - d, c.theta + d},
                                             AnglePair{c.phi - d, c.theta - d}})
                    if (off.size() < n_off && axis_separated(cand, paths, axis_sep))
                        off.push_back(cand);
            }
        for (int guard = 0; off.size() < n_off && guard < 100000; ++guard)
        {
            const AnglePair cand = draw_dir(60.0, 55.0, 125.0);
            if (axis_separated(cand, paths, axis_sep))
                off.push_back(cand);
        }
        if (off.size() < n_off)
            throw std::runtime_error("random_probe_instance: failed to place off-path beams");
        cb.beams.insert(cb.beams.end(), off.begin(), off.end());
        return cb;
    };
    out.rx_cb = build_cb(aoas, 26, {10.0, 18.0});
    out.tx_cb = build_cb(aods, 12, {12.0});
    return out;
}

} // namespace mmbeam
