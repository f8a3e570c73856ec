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

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmbeam/beamsel.hpp"
#include "mmbeam/harness.hpp"
#include "mmbeam/rng.hpp"
#include "mmbeam/search.hpp"

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_resource = 3;

int cmd_run(const std::string &config_path, const std::string &out_path,
            const std::vector<std::pair<std::string, std::string>> &overrides)
{
    mmbeam::ExperimentConfig cfg;
    if (!config_path.empty())
        cfg = mmbeam::load_config_file(config_path);
    for (const auto &[key, value] : overrides)
        mmbeam::apply_setting(cfg, "run", key, value);
    mmbeam::validate(cfg);

    const std::vector<mmbeam::ResultRow> rows = mmbeam::run_experiment(cfg);

    std::ofstream out(out_path);
    if (!out)
        throw mmbeam::ConfigError("cannot open output file: " + out_path);
    mmbeam::write_csv(out, rows);
    if (!out.flush())
        throw std::runtime_error("failed writing output file: " + out_path);

    const bool has_baseline = std::any_of(rows.begin(), rows.end(), [](const auto &r) {
        return r.method == mmbeam::Method::exhaustive;
    });
    if (has_baseline)
        mmbeam::write_summary(std::cout, mmbeam::summarize(rows));
    else
        std::cout << "summary table skipped: no exhaustive rows to compare against\n";
    std::cout << rows.size() << " rows written to " << out_path << '\n';
    return exit_ok;
}

int cmd_probe(const std::string &out_path, const std::vector<std::size_t> &sizes,
              std::size_t draws, std::uint64_t seed)
{
    mmbeam::Lemma1Config probe_cfg;
    probe_cfg.per_subarray_antennas = sizes;

    std::ofstream out(out_path);
    if (!out)
        throw mmbeam::ConfigError("cannot open output file: " + out_path);
    out << "draw,n,min_matched,max_unmatched,dominance,ordering_matches_gains\n";
    out.precision(12);

    // Pass counters for the two large-array claims: the matched/unmatched ratio
    // growing at least linearly in N across quadruplings (checked from 64 up),
    // and matched-beam powers ordering like the ray gains.
    std::size_t growth_pass = 0, growth_total = 0;
    std::size_t ordering_pass = 0, ordering_total = 0;

    const mmbeam::Rng root(seed);
    for (std::size_t d = 0; d < draws; ++d)
    {
        mmbeam::Rng rng = root.fork(d);
        const mmbeam::ProbeInstance inst = mmbeam::random_probe_instance(rng);
        const mmbeam::Lemma1Report report =
            mmbeam::lemma1_probe(inst.rays, inst.rx_cb, inst.tx_cb, probe_cfg);

        for (const mmbeam::Lemma1SizeSummary &s : report.summary)
            out << d << ',' << s.n << ',' << s.min_matched << ',' << s.max_unmatched << ','
                << s.dominance << ',' << (s.ordering_matches_gains ? 1 : 0) << '\n';

        bool growth_ok = true, any_pair = false;
        bool ordering_ok = true, any_order = false;
        for (std::size_t i = 1; i < report.summary.size(); ++i)
        {
            const auto &lo = report.summary[i - 1];
            const auto &hi = report.summary[i];
            if (lo.n >= 64 && hi.n == 4 * lo.n)
            {
                any_pair = true;
                growth_ok = growth_ok && hi.dominance >= 4.0 * lo.dominance;
            }
        }
        for (const mmbeam::Lemma1SizeSummary &s : report.summary)
            if (s.n >= 64)
            {
                any_order = true;
                ordering_ok = ordering_ok && s.ordering_matches_gains;
            }
        if (any_pair)
        {
            ++growth_total;
            if (growth_ok)
                ++growth_pass;
        }
        if (any_order)
        {
            ++ordering_total;
            if (ordering_ok)
                ++ordering_pass;
        }
    }
    if (!out.flush())
        throw std::runtime_error("failed writing output file: " + out_path);

    std::cout << "draws: " << draws << '\n';
    if (growth_total > 0)
        std::cout << "dominance growth >= 4x per quadrupling (N >= 64): " << growth_pass << "/"
                  << growth_total << '\n';
    if (ordering_total > 0)
        std::cout << "matched-power ordering follows gains (N >= 64): " << ordering_pass << "/"
                  << ordering_total << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"beam selection simulator for millimeter wave arrays of subarrays"};
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "Monte Carlo strategy comparison over an SNR sweep");
    std::string config_path, out_path;
    std::string methods, p_list, snr_spec, scoring;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    run->add_option("--config", config_path, "experiment config file");
    run->add_option("--out", out_path, "output CSV path")->required();
    auto *seed_opt = run->add_option("--seed", seed, "override run.master_seed");
    run->add_option("--methods", methods, "override run.methods (comma list)");
    run->add_option("--p", p_list, "override run.p_values (comma list)");
    run->add_option("--snr", snr_spec, "override run.snr_db (value or lo:hi:step)");
    run->add_option("--trials", trials, "override run.trials");
    run->add_option("--scoring", scoring, "override run.scoring (genie|noisy)");

    auto *probe = app.add_subcommand("probe-lemma1",
                                     "matched/unmatched effective-power growth probe");
    std::string probe_out;
    std::vector<std::size_t> sizes{16, 64, 256};
    std::size_t draws = 100;
    std::uint64_t probe_seed = 1;
    probe->add_option("--out", probe_out, "output CSV path")->required();
    probe->add_option("--sizes", sizes, "per-subarray antenna counts (perfect squares)");
    probe->add_option("--draws", draws, "number of random scenarios");
    probe->add_option("--seed", probe_seed, "scenario seed");

    try
    {
        app.parse(argc, argv);

        if (run->parsed())
        {
            std::vector<std::pair<std::string, std::string>> overrides;
            if (!methods.empty())
                overrides.emplace_back("methods", methods);
            if (!p_list.empty())
                overrides.emplace_back("p_values", p_list);
            if (!snr_spec.empty())
                overrides.emplace_back("snr_db", snr_spec);
            if (trials > 0)
                overrides.emplace_back("trials", std::to_string(trials));
            if (!scoring.empty())
                overrides.emplace_back("scoring", scoring);
            if (seed_opt->count() > 0)
                overrides.emplace_back("master_seed", std::to_string(seed));
            return cmd_run(config_path, out_path, overrides);
        }
        return cmd_probe(probe_out, sizes, draws, probe_seed);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    catch (const mmbeam::ResourceCapError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_resource;
    }
    catch (const mmbeam::ConfigError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
