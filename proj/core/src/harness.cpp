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

#include "mmbeam/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <tuple>

#include "mmbeam/aoa.hpp"
#include "mmbeam/beamsel.hpp"
#include "mmbeam/rng.hpp"
#include "mmbeam/search.hpp"
#include "mmbeam/sounding.hpp"

namespace mmbeam
{

namespace
{

constexpr double deg2rad = two_pi / 360.0;

// Stream tags for per-trial seed derivation. Every random draw hangs off
// derive_key chains rooted at the trial seed, so the work done for one method
// never shifts the randomness seen by another.
constexpr std::uint64_t stream_channel = 1;
constexpr std::uint64_t stream_main_noise = 2;
constexpr std::uint64_t stream_aoa_tensor_noise = 3;
constexpr std::uint64_t stream_aoa_sampling_noise = 4;
constexpr std::uint64_t stream_random_subset = 5;

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos)
        {
            out.push_back(trim(s.substr(start)));
            return out;
        }
        out.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
}

double to_double(const std::string &name, const std::string &v)
{
    try
    {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing characters");
        return x;
    }
    catch (const std::exception &)
    {
        throw ConfigError("bad numeric value for " + name + ": '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string &name, const std::string &v)
{
    try
    {
        if (v.find('-') != std::string::npos)
            throw std::invalid_argument("negative");
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing characters");
        return x;
    }
    catch (const std::exception &)
    {
        throw ConfigError("bad integer value for " + name + ": '" + v + "'");
    }
}

std::size_t to_size(const std::string &name, const std::string &v)
{
    return static_cast<std::size_t>(to_u64(name, v));
}

Method to_method(const std::string &name, const std::string &v)
{
    if (v == "exhaustive")
        return Method::exhaustive;
    if (v == "effpower")
        return Method::effpower;
    if (v == "aoa")
        return Method::aoa;
    if (v == "random")
        return Method::random_sub;
    throw ConfigError("unknown method in " + name + ": '" + v + "'");
}

// Looks for rx subarrays forming the correlation triple: a reference plus one
// displaced by (d_y, 0) and one by (0, d_z).
std::optional<SubarrayTriple> find_triple(const SubarrayLayout &layout, double d_y, double d_z)
{
    constexpr double tol = 1e-12;
    const auto &off = layout.offsets;
    for (std::size_t ref = 0; ref < off.size(); ++ref)
    {
        std::optional<std::size_t> yi, zi;
        for (std::size_t s = 0; s < off.size(); ++s)
        {
            if (s == ref)
                continue;
            if (std::abs(off[s].d_y - off[ref].d_y - d_y) < tol &&
                std::abs(off[s].d_z - off[ref].d_z) < tol)
                yi = s;
            if (std::abs(off[s].d_z - off[ref].d_z - d_z) < tol &&
                std::abs(off[s].d_y - off[ref].d_y) < tol)
                zi = s;
        }
        if (yi && zi)
            return SubarrayTriple{ref, *yi, *zi, d_y, d_z};
    }
    return std::nullopt;
}

} // namespace

std::string method_name(Method m)
{
    switch (m)
    {
    case Method::exhaustive: return "exhaustive";
    case Method::effpower: return "effpower";
    case Method::aoa: return "aoa";
    case Method::random_sub: return "random";
    }
    throw std::invalid_argument("method_name: bad enum value");
}

void apply_setting(ExperimentConfig &cfg, const std::string &section, const std::string &key,
                   const std::string &value)
{
    const std::string full = section + "." + key;
    auto interval_rad = [&](AngleInterval &iv) {
        const auto parts = split(value, ':');
        if (parts.size() != 2)
            throw ConfigError(full + " expects 'lo:hi'");
        iv = AngleInterval{to_double(full, parts[0]) * deg2rad,
                           to_double(full, parts[1]) * deg2rad};
    };
    auto sector_rad = [&](double &lo, double &hi) {
        const auto parts = split(value, ':');
        if (parts.size() != 2)
            throw ConfigError(full + " expects 'lo:hi'");
        lo = to_double(full, parts[0]) * deg2rad;
        hi = to_double(full, parts[1]) * deg2rad;
    };

    if (section == "arrays")
    {
        if (key == "tx_subarrays") cfg.tx_subarrays = to_size(full, value);
        else if (key == "tx_antennas_y") cfg.tx_antennas_y = to_size(full, value);
        else if (key == "tx_antennas_z") cfg.tx_antennas_z = to_size(full, value);
        else if (key == "rx_subarrays") cfg.rx_subarrays = to_size(full, value);
        else if (key == "rx_antennas_y") cfg.rx_antennas_y = to_size(full, value);
        else if (key == "rx_antennas_z") cfg.rx_antennas_z = to_size(full, value);
        else if (key == "rx_arrangement")
        {
            if (value == "row") cfg.rx_arrangement = Arrangement::row;
            else if (value == "corner") cfg.rx_arrangement = Arrangement::corner;
            else throw ConfigError(full + " must be 'row' or 'corner'");
        }
        else if (key == "spacing") cfg.spacing = to_double(full, value);
        else throw ConfigError("unknown setting '" + full + "'");
    }
    else if (section == "codebooks")
    {
        if (key == "tx_beams") cfg.tx_beams = to_size(full, value);
        else if (key == "rx_beams") cfg.rx_beams = to_size(full, value);
        else if (key == "tx_sector_deg") sector_rad(cfg.tx_sector_lo, cfg.tx_sector_hi);
        else if (key == "rx_sector_deg") sector_rad(cfg.rx_sector_lo, cfg.rx_sector_hi);
        else throw ConfigError("unknown setting '" + full + "'");
    }
    else if (section == "channel")
    {
        if (key == "clusters") cfg.cluster.n_clusters = to_size(full, value);
        else if (key == "rays_per_cluster") cfg.cluster.rays_per_cluster = to_size(full, value);
        else if (key == "aod_azimuth_deg") interval_rad(cfg.cluster.aod_azimuth);
        else if (key == "aod_elevation_deg") interval_rad(cfg.cluster.aod_elevation);
        else if (key == "aoa_azimuth_deg") interval_rad(cfg.cluster.aoa_azimuth);
        else if (key == "aoa_elevation_deg") interval_rad(cfg.cluster.aoa_elevation);
        else if (key == "ray_spread_deg") cfg.cluster.ray_spread = to_double(full, value) * deg2rad;
        else if (key == "cluster_decay") cfg.cluster.cluster_decay = to_double(full, value);
        else if (key == "max_doppler_hz") cfg.cluster.max_doppler_hz = to_double(full, value);
        else throw ConfigError("unknown setting '" + full + "'");
    }
    else if (section == "run")
    {
        if (key == "snr_db")
        {
            const auto parts = split(value, ':');
            if (parts.size() == 1)
            {
                cfg.snr_lo_db = cfg.snr_hi_db = to_double(full, parts[0]);
                cfg.snr_step_db = 1.0;
            }
            else if (parts.size() == 3)
            {
                cfg.snr_lo_db = to_double(full, parts[0]);
                cfg.snr_hi_db = to_double(full, parts[1]);
                cfg.snr_step_db = to_double(full, parts[2]);
            }
            else
                throw ConfigError(full + " expects 'value' or 'lo:hi:step'");
        }
        else if (key == "trials") cfg.trials = to_size(full, value);
        else if (key == "p_values")
        {
            cfg.p_values.clear();
            for (const std::string &item : split(value, ','))
                cfg.p_values.push_back(to_size(full, item));
        }
        else if (key == "methods")
        {
            cfg.methods.clear();
            for (const std::string &item : split(value, ','))
                cfg.methods.push_back(to_method(full, item));
        }
        else if (key == "master_seed") cfg.master_seed = to_u64(full, value);
        else if (key == "scoring")
        {
            if (value == "genie") cfg.scoring = Scoring::genie;
            else if (value == "noisy") cfg.scoring = Scoring::noisy;
            else throw ConfigError(full + " must be 'genie' or 'noisy'");
        }
        else if (key == "effpower_sides")
        {
            if (value == "rx") cfg.effpower_sides = EffpowerSides::rx;
            else if (value == "both") cfg.effpower_sides = EffpowerSides::both;
            else throw ConfigError(full + " must be 'rx' or 'both'");
        }
        else if (key == "aoa_d_y") cfg.aoa_d_y = to_double(full, value);
        else if (key == "aoa_d_z") cfg.aoa_d_z = to_double(full, value);
        else if (key == "aoa_instances") cfg.aoa_instances = to_size(full, value);
        else if (key == "aoa_dt") cfg.aoa_dt = to_double(full, value);
        else throw ConfigError("unknown setting '" + full + "'");
    }
    else
        throw ConfigError("unknown section '" + section + "'");
}

ExperimentConfig load_config(std::istream &is)
{
    ExperimentConfig cfg;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        try
        {
            if (line.front() == '[')
            {
                if (line.back() != ']')
                    throw ConfigError("unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty())
                    throw ConfigError("empty section name");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected 'key = value'");
            if (section.empty())
                throw ConfigError("setting before any [section] header");
            apply_setting(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        catch (const ConfigError &e)
        {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file: " + path);
    return load_config(f);
}

void validate(const ExperimentConfig &cfg)
{
    auto fail = [](const std::string &m) { throw ConfigError(m); };
    if (cfg.tx_subarrays == 0 || cfg.rx_subarrays == 0)
        fail("need at least one subarray per side");
    if (cfg.tx_antennas_y == 0 || cfg.tx_antennas_z == 0 || cfg.rx_antennas_y == 0 ||
        cfg.rx_antennas_z == 0)
        fail("antenna counts must be positive");
    if (!(cfg.spacing > 0.0))
        fail("spacing must be positive");
    if (cfg.tx_subarrays != 2)
        fail("the built-in baseband codebook supports exactly 2 tx subarrays");
    if (cfg.rx_arrangement == Arrangement::corner && cfg.rx_subarrays < 3)
        fail("rx_arrangement = corner needs at least 3 rx subarrays");
    if (cfg.tx_beams == 0 || cfg.rx_beams == 0)
        fail("codebooks need at least one beam");
    if (!(cfg.tx_sector_lo < cfg.tx_sector_hi) || !(cfg.rx_sector_lo < cfg.rx_sector_hi))
        fail("codebook sectors must satisfy lo < hi");

    if (cfg.cluster.n_clusters == 0 || cfg.cluster.rays_per_cluster == 0)
        fail("channel needs at least one cluster and one ray per cluster");
    if (cfg.cluster.ray_spread < 0.0 || cfg.cluster.cluster_decay < 0.0 ||
        cfg.cluster.max_doppler_hz < 0.0)
        fail("channel spread, decay, and doppler must be nonnegative");
    for (const AngleInterval &iv : {cfg.cluster.aod_azimuth, cfg.cluster.aod_elevation,
                                    cfg.cluster.aoa_azimuth, cfg.cluster.aoa_elevation})
        if (iv.lo > iv.hi)
            fail("channel angle interval is inverted");

    if (!(cfg.snr_step_db > 0.0))
        fail("snr step must be positive");
    if (cfg.snr_hi_db < cfg.snr_lo_db)
        fail("snr range is inverted");
    if (cfg.trials == 0)
        fail("trials must be >= 1");
    if (cfg.methods.empty())
        fail("no methods requested");
    if (cfg.p_values.empty())
        fail("p_values must not be empty");
    for (const std::size_t p : cfg.p_values)
        if (p == 0 || p > cfg.tx_beams || p > cfg.rx_beams)
            fail("every p must lie in [1, codebook size] on both sides");
    if (!(cfg.aoa_d_y > 0.0) || !(cfg.aoa_d_z > 0.0))
        fail("aoa displacements must be positive");
    if (!(cfg.aoa_dt > 0.0))
        fail("aoa sampling interval must be positive");

    const bool want_aoa =
        std::find(cfg.methods.begin(), cfg.methods.end(), Method::aoa) != cfg.methods.end();
    if (want_aoa && cfg.aoa_instances > 0 &&
        !find_triple(rx_layout(cfg), cfg.aoa_d_y, cfg.aoa_d_z))
        fail("sampled aoa statistics need rx subarrays at displacements (d_y,0) and (0,d_z) "
             "from a common reference; use rx_arrangement = corner with matching aoa_d_y and "
             "aoa_d_z, or aoa_instances = 0 for the analytic route");
}

SubarrayLayout tx_layout(const ExperimentConfig &cfg)
{
    const PlanarArray panel(cfg.tx_antennas_y, cfg.tx_antennas_z, cfg.spacing);
    std::vector<SubarrayOffset> off(cfg.tx_subarrays);
    const double pitch = static_cast<double>(cfg.tx_antennas_y) * cfg.spacing;
    for (std::size_t s = 0; s < off.size(); ++s)
        off[s] = SubarrayOffset{static_cast<double>(s) * pitch, 0.0};
    return SubarrayLayout(panel, std::move(off));
}

SubarrayLayout rx_layout(const ExperimentConfig &cfg)
{
    const PlanarArray panel(cfg.rx_antennas_y, cfg.rx_antennas_z, cfg.spacing);
    std::vector<SubarrayOffset> off(cfg.rx_subarrays);
    const double pitch_y = static_cast<double>(cfg.rx_antennas_y) * cfg.spacing;
    for (std::size_t s = 0; s < off.size(); ++s)
        off[s] = SubarrayOffset{static_cast<double>(s) * pitch_y, 0.0};
    if (cfg.rx_arrangement == Arrangement::corner)
    {
        const double pitch_z = static_cast<double>(cfg.rx_antennas_z) * cfg.spacing;
        off[2] = SubarrayOffset{0.0, pitch_z};
        for (std::size_t s = 3; s < off.size(); ++s)
            off[s] = SubarrayOffset{static_cast<double>(s - 1) * pitch_y, 0.0};
    }
    return SubarrayLayout(panel, std::move(off));
}

RFCodebook tx_codebook(const ExperimentConfig &cfg)
{
    return uniform_codebook(cfg.tx_sector_lo, cfg.tx_sector_hi, cfg.tx_beams);
}

RFCodebook rx_codebook(const ExperimentConfig &cfg)
{
    return uniform_codebook(cfg.rx_sector_lo, cfg.rx_sector_hi, cfg.rx_beams);
}

std::vector<double> snr_grid(const ExperimentConfig &cfg)
{
    const auto n = static_cast<std::size_t>(
        std::floor((cfg.snr_hi_db - cfg.snr_lo_db) / cfg.snr_step_db + 1e-9));
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        out[i] = cfg.snr_lo_db + static_cast<double>(i) * cfg.snr_step_db;
    return out;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig &cfg)
{
    validate(cfg);
    const SubarrayLayout tx = tx_layout(cfg);
    const SubarrayLayout rx = rx_layout(cfg);
    const RFCodebook txcb = tx_codebook(cfg);
    const RFCodebook rxcb = rx_codebook(cfg);
    const BBCodebook bb = default_bb_codebook(2, 2);
    const std::vector<double> snrs = snr_grid(cfg);

    std::vector<Method> methods = cfg.methods;
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
    const bool tx_pruning = cfg.effpower_sides == EffpowerSides::both;
    const bool want_aoa =
        std::find(methods.begin(), methods.end(), Method::aoa) != methods.end();

    SubarrayTriple triple{0, 1, 2, cfg.aoa_d_y, cfg.aoa_d_z};
    if (want_aoa && cfg.aoa_instances > 0)
        triple = *find_triple(rx, cfg.aoa_d_y, cfg.aoa_d_z);
    std::vector<double> times(cfg.aoa_instances);
    for (std::size_t l = 0; l < times.size(); ++l)
        times[l] = static_cast<double>(l) * cfg.aoa_dt;

    std::vector<std::size_t> all_tx(cfg.tx_beams);
    std::iota(all_tx.begin(), all_tx.end(), std::size_t{0});

    std::vector<ResultRow> rows;

    for (std::size_t trial = 0; trial < cfg.trials; ++trial)
    {
        const std::uint64_t trial_seed = derive_key(cfg.master_seed, trial);
        Rng ch_rng(derive_key(trial_seed, stream_channel));
        const ChannelRealization ch = draw_realization(cfg.cluster, tx, rx, ch_rng);
        const MeasurementTensor clean = measure_ray_expansion(ch, txcb, rxcb);

        for (std::size_t s = 0; s < snrs.size(); ++s)
        {
            const double sigma2 = std::pow(10.0, -snrs[s] / 10.0);
            const MeasurementTensor noisy = add_noise(
                clean, NoiseModel{sigma2, derive_key(derive_key(trial_seed, stream_main_noise), s)});

            // Selection always sees the noisy tensor; genie scoring re-evaluates the
            // winner on the noiseless one.
            auto rescore = [&](const SearchResult &res, const MeasurementTensor &clean_t,
                               const MeasurementTensor &noisy_t) {
                if (cfg.scoring == Scoring::noisy)
                    return res.mutual_info;
                (void)noisy_t;
                return mutual_information(compressed_channel(clean_t, res.selection, bb), sigma2);
            };

            std::optional<std::vector<double>> rx_pow, tx_pow;
            auto rx_power = [&]() -> const std::vector<double> & {
                if (!rx_pow)
                    rx_pow = effective_power_rx(noisy);
                return *rx_pow;
            };
            auto tx_power = [&]() -> const std::vector<double> & {
                if (!tx_pow)
                    tx_pow = effective_power_tx(noisy);
                return *tx_pow;
            };

            std::optional<CorrelationStats> stats;
            auto aoa_stats = [&]() -> const CorrelationStats & {
                if (!stats)
                {
                    if (cfg.aoa_instances == 0)
                        stats = analytic_stats(ch, triple, txcb, rxcb, sigma2);
                    else
                        stats = accumulate_stats(
                            ch, triple, txcb, rxcb, times,
                            NoiseModel{sigma2, derive_key(derive_key(trial_seed,
                                                                     stream_aoa_sampling_noise), s)});
                }
                return *stats;
            };

            for (const Method m : methods)
            {
                switch (m)
                {
                case Method::exhaustive:
                {
                    const SearchResult res = exhaustive_search(noisy, bb, sigma2);
                    rows.push_back(ResultRow{snrs[s], m, std::nullopt, trial,
                                             rescore(res, clean, noisy), res.combinations,
                                             trial_seed});
                    break;
                }
                case Method::effpower:
                {
                    for (const std::size_t p : cfg.p_values)
                    {
                        const auto rx_cand = top_p(rx_power(), p);
                        const auto tx_cand = tx_pruning ? top_p(tx_power(), p) : all_tx;
                        const SearchResult res =
                            restricted_search(noisy, bb, sigma2, rx_cand, tx_cand);
                        rows.push_back(ResultRow{snrs[s], m, p, trial,
                                                 rescore(res, clean, noisy), res.combinations,
                                                 trial_seed});
                    }
                    break;
                }
                case Method::aoa:
                {
                    for (std::size_t pi = 0; pi < cfg.p_values.size(); ++pi)
                    {
                        const std::size_t p = cfg.p_values[pi];
                        std::vector<AnglePair> rx_dirs;
                        try
                        {
                            const AoAReport rep = estimate_aoas(aoa_stats(), triple, rxcb, p);
                            rx_dirs = steer_candidates(rep.estimates);
                        }
                        catch (const std::runtime_error &)
                        {
                            // every pair discarded: steer at the strongest pairs'
                            // codebook beams instead
                            for (const auto &[j, k] : top_pairs(aoa_stats(), p))
                            {
                                (void)j;
                                const AnglePair d = rxcb.beams[k];
                                if (std::find(rx_dirs.begin(), rx_dirs.end(), d) == rx_dirs.end())
                                    rx_dirs.push_back(d);
                            }
                        }
                        RFCodebook rx_steer{std::move(rx_dirs)};
                        RFCodebook tx_sub;
                        if (tx_pruning)
                            for (const std::size_t idx : top_p(tx_power(), p))
                                tx_sub.beams.push_back(txcb.beams[idx]);
                        else
                            tx_sub = txcb;

                        const MeasurementTensor a_clean = measure_ray_expansion(ch, tx_sub, rx_steer);
                        const MeasurementTensor a_noisy = add_noise(
                            a_clean,
                            NoiseModel{sigma2,
                                       derive_key(derive_key(derive_key(trial_seed,
                                                                        stream_aoa_tensor_noise), s), pi)});
                        const SearchResult res = exhaustive_search(a_noisy, bb, sigma2);
                        rows.push_back(ResultRow{snrs[s], m, p, trial,
                                                 rescore(res, a_clean, a_noisy), res.combinations,
                                                 trial_seed});
                    }
                    break;
                }
                case Method::random_sub:
                {
                    for (std::size_t pi = 0; pi < cfg.p_values.size(); ++pi)
                    {
                        Rng rng(derive_key(derive_key(derive_key(trial_seed,
                                                                 stream_random_subset), s), pi));
                        const SearchResult res =
                            random_subset_search(noisy, bb, sigma2, cfg.p_values[pi], rng);
                        rows.push_back(ResultRow{snrs[s], m, cfg.p_values[pi], trial,
                                                 rescore(res, clean, noisy), res.combinations,
                                                 trial_seed});
                    }
                    break;
                }
                }
            }
        }
    }
    return rows;
}

namespace
{

bool row_less(const ResultRow &a, const ResultRow &b)
{
    if (a.method != b.method)
        return static_cast<int>(a.method) < static_cast<int>(b.method);
    const std::size_t pa = a.p.value_or(0), pb = b.p.value_or(0);
    if (pa != pb)
        return pa < pb;
    if (a.snr_db != b.snr_db)
        return a.snr_db < b.snr_db;
    return a.trial < b.trial;
}

} // namespace

void write_csv(std::ostream &os, std::span<const ResultRow> rows)
{
    std::vector<ResultRow> sorted(rows.begin(), rows.end());
    std::stable_sort(sorted.begin(), sorted.end(), row_less);

    os << "snr_db,method,p,trial,mutual_info_bps_hz,combinations,seed\n";
    const auto old_precision = os.precision(12);
    for (const ResultRow &r : sorted)
    {
        os << r.snr_db << ',' << method_name(r.method) << ',';
        if (r.p)
            os << *r.p;
        else
            os << "full";
        os << ',' << r.trial << ',' << r.mutual_info << ',' << r.combinations << ',' << r.seed
           << '\n';
    }
    os.precision(old_precision);
}

std::vector<SummaryRow> summarize(std::span<const ResultRow> rows)
{
    struct Acc
    {
        double mi = 0.0;
        double combos = 0.0;
        std::size_t n = 0;
    };
    // key: (method rank, p with 0 = "full", snr)
    std::map<std::tuple<int, std::size_t, double>, Acc> groups;
    for (const ResultRow &r : rows)
    {
        Acc &a = groups[{static_cast<int>(r.method), r.p.value_or(0), r.snr_db}];
        a.mi += r.mutual_info;
        a.combos += static_cast<double>(r.combinations);
        ++a.n;
    }

    std::vector<std::pair<double, Acc>> baseline; // (snr, means), ascending snr
    bool have_others = false;
    for (const auto &[key, acc] : groups)
    {
        if (std::get<0>(key) == static_cast<int>(Method::exhaustive))
            baseline.emplace_back(std::get<2>(key), acc);
        else
            have_others = true;
    }
    if (have_others && baseline.empty())
        throw std::invalid_argument("summarize: no exhaustive baseline rows");

    auto baseline_at = [&](double snr) -> const Acc * {
        for (const auto &[bs, acc] : baseline)
            if (std::abs(bs - snr) < 1e-9)
                return &acc;
        return nullptr;
    };
    // Inverts the piecewise-linear exhaustive mean-MI curve at the given MI level.
    auto curve_snr_at = [&](double mi) -> std::optional<double> {
        if (baseline.size() < 2)
            return std::nullopt;
        for (std::size_t i = 1; i < baseline.size(); ++i)
        {
            const double mi0 = baseline[i - 1].second.mi / static_cast<double>(baseline[i - 1].second.n);
            const double mi1 = baseline[i].second.mi / static_cast<double>(baseline[i].second.n);
            if (mi0 <= mi && mi <= mi1)
            {
                const double s0 = baseline[i - 1].first, s1 = baseline[i].first;
                if (mi1 == mi0)
                    return s0;
                return s0 + (s1 - s0) * (mi - mi0) / (mi1 - mi0);
            }
        }
        return std::nullopt;
    };

    std::vector<SummaryRow> out;
    out.reserve(groups.size());
    for (const auto &[key, acc] : groups)
    {
        SummaryRow r;
        r.method = static_cast<Method>(std::get<0>(key));
        if (std::get<1>(key) != 0)
            r.p = std::get<1>(key);
        r.snr_db = std::get<2>(key);
        r.mean_mi = acc.mi / static_cast<double>(acc.n);
        r.mean_combinations = acc.combos / static_cast<double>(acc.n);
        if (const Acc *base = baseline_at(r.snr_db))
        {
            r.mi_delta = r.mean_mi - base->mi / static_cast<double>(base->n);
            if (base->combos > 0.0)
                r.combo_ratio = r.mean_combinations / (base->combos / static_cast<double>(base->n));
        }
        if (const auto at = curve_snr_at(r.mean_mi))
            r.gap_db = r.snr_db - *at;
        out.push_back(std::move(r));
    }
    return out;
}

void write_summary(std::ostream &os, std::span<const SummaryRow> rows)
{
    os << std::left << std::setw(11) << "method" << std::setw(6) << "p" << std::right
       << std::setw(8) << "snr_db" << std::setw(14) << "mean_mi" << std::setw(10) << "gap_db"
       << std::setw(14) << "mean_combos" << std::setw(12) << "ratio" << '\n';
    for (const SummaryRow &r : rows)
    {
        os << std::left << std::setw(11) << method_name(r.method) << std::setw(6)
           << (r.p ? std::to_string(*r.p) : std::string("full")) << std::right;
        os << std::setw(8) << std::fixed << std::setprecision(1) << r.snr_db;
        os << std::setw(14) << std::setprecision(6) << r.mean_mi;
        if (r.gap_db)
            os << std::setw(10) << std::setprecision(3) << *r.gap_db;
        else
            os << std::setw(10) << "n/a";
        os << std::setw(14) << std::setprecision(1) << r.mean_combinations;
        if (r.combo_ratio)
            os << std::setw(12) << std::setprecision(6) << *r.combo_ratio;
        else
            os << std::setw(12) << "n/a";
        os << '\n';
        os.unsetf(std::ios::floatfield);
    }
}

} // namespace mmbeam
