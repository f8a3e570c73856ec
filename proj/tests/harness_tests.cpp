// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mmbeam/harness.hpp"

using namespace mmbeam;

namespace
{

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.tx_beams = 6;
    cfg.rx_beams = 4;
    cfg.trials = 3;
    cfg.snr_lo_db = cfg.snr_hi_db = 10.0;
    cfg.snr_step_db = 1.0;
    cfg.p_values = {2};
    cfg.methods = {Method::exhaustive, Method::effpower};
    return cfg;
}

double mi_of(const std::vector<ResultRow> &rows, Method m, std::optional<std::size_t> p,
             std::size_t trial, double snr)
{
    for (const ResultRow &r : rows)
        if (r.method == m && r.p == p && r.trial == trial && r.snr_db == snr)
            return r.mutual_info;
    REQUIRE(false);
    return 0.0;
}

} // namespace

TEST_CASE("config files parse into settings")
{
    std::stringstream ss(R"(# experiment
[arrays]
tx_subarrays = 2
tx_antennas_y = 8
rx_subarrays = 3
rx_antennas_y = 4
rx_arrangement = corner
spacing = 0.5

[codebooks]
tx_beams = 12
tx_sector_deg = -60 : 60
rx_beams = 8
rx_sector_deg = -90:90

[channel]
clusters = 4
rays_per_cluster = 5
ray_spread_deg = 5
aoa_azimuth_deg = -90:90
max_doppler_hz = 80

[run]
snr_db = -10:20:5
trials = 7
p_values = 1, 2, 3
methods = exhaustive, effpower, aoa, random
master_seed = 99
scoring = noisy
effpower_sides = rx
aoa_d_y = 2.0
aoa_d_z = 0.5
aoa_instances = 100
aoa_dt = 0.002
)");
    const ExperimentConfig cfg = load_config(ss);
    CHECK(cfg.rx_subarrays == 3);
    CHECK(cfg.rx_arrangement == Arrangement::corner);
    CHECK(cfg.tx_beams == 12);
    CHECK(cfg.tx_sector_lo == doctest::Approx(-two_pi / 6.0).epsilon(1e-12));
    CHECK(cfg.cluster.ray_spread == doctest::Approx(5.0 * two_pi / 360.0).epsilon(1e-12));
    CHECK(cfg.cluster.max_doppler_hz == 80.0);
    CHECK(cfg.trials == 7);
    CHECK(cfg.p_values == std::vector<std::size_t>{1, 2, 3});
    CHECK(cfg.methods.size() == 4);
    CHECK(cfg.methods[3] == Method::random_sub);
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.scoring == Scoring::noisy);
    CHECK(cfg.effpower_sides == EffpowerSides::rx);
    CHECK(cfg.aoa_d_y == 2.0);
    CHECK(cfg.aoa_instances == 100);
    CHECK(cfg.aoa_dt == 0.002);
    CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("config errors carry the line number and setting name")
{
    std::stringstream unknown("[arrays]\nnope = 3\n");
    CHECK_THROWS_WITH_AS(load_config(unknown), doctest::Contains("line 2"), ConfigError);

    std::stringstream no_section("trials = 5\n");
    CHECK_THROWS_WITH_AS(load_config(no_section), doctest::Contains("section"), ConfigError);

    std::stringstream no_eq("[run]\ntrials\n");
    CHECK_THROWS_AS(load_config(no_eq), ConfigError);

    std::stringstream bad_method("[run]\nmethods = exhaustive, magic\n");
    CHECK_THROWS_WITH_AS(load_config(bad_method), doctest::Contains("magic"), ConfigError);

    std::stringstream bad_num("[run]\ntrials = many\n");
    CHECK_THROWS_AS(load_config(bad_num), ConfigError);

    std::stringstream bad_snr("[run]\nsnr_db = 1:2\n");
    CHECK_THROWS_AS(load_config(bad_snr), ConfigError);

    CHECK_THROWS_AS(load_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("validation rejects inconsistent experiments")
{
    ExperimentConfig cfg;
    cfg.tx_subarrays = 3;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("2 tx subarrays"), ConfigError);

    cfg = ExperimentConfig{};
    cfg.p_values = {9}; // rx codebook only has 8 beams
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = ExperimentConfig{};
    cfg.rx_arrangement = Arrangement::corner;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("3 rx subarrays"), ConfigError);

    cfg = ExperimentConfig{};
    cfg.aoa_instances = 50; // row layout has no (0, d_z) subarray
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("corner"), ConfigError);

    cfg = ExperimentConfig{};
    cfg.trials = 0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = ExperimentConfig{};
    cfg.snr_lo_db = 10.0;
    cfg.snr_hi_db = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("layouts and snr grid derive from the config")
{
    ExperimentConfig cfg;
    const SubarrayLayout tx = tx_layout(cfg);
    CHECK(tx.n_subarrays() == 2);
    CHECK(tx.subarray.n_y == 8);
    CHECK(tx.offsets[1].d_y == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(tx.offsets[1].d_z == 0.0);

    cfg.rx_subarrays = 4;
    cfg.rx_arrangement = Arrangement::corner;
    const SubarrayLayout rx = rx_layout(cfg);
    CHECK(rx.offsets[1].d_y == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rx.offsets[2].d_y == 0.0);
    CHECK(rx.offsets[2].d_z == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rx.offsets[3].d_y == doctest::Approx(4.0).epsilon(1e-12));

    const std::vector<double> grid = snr_grid(cfg);
    REQUIRE(grid.size() == 7);
    CHECK(grid.front() == -10.0);
    CHECK(grid.back() == 20.0);

    apply_setting(cfg, "run", "snr_db", "7.5");
    const std::vector<double> single = snr_grid(cfg);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == 7.5);

    CHECK(method_name(Method::exhaustive) == "exhaustive");
    CHECK(method_name(Method::effpower) == "effpower");
    CHECK(method_name(Method::aoa) == "aoa");
    CHECK(method_name(Method::random_sub) == "random");
}

TEST_CASE("a sweep produces one row per (trial, snr, method, p)")
{
    ExperimentConfig cfg = small_config();
    cfg.methods = {Method::exhaustive, Method::effpower, Method::aoa, Method::random_sub};
    cfg.p_values = {1, 3};
    cfg.trials = 2;
    cfg.snr_lo_db = -5.0;
    cfg.snr_hi_db = 5.0;
    cfg.snr_step_db = 5.0;

    const std::vector<ResultRow> rows = run_experiment(cfg);
    CHECK(rows.size() == 2 * 3 * (1 + 2 + 2 + 2));

    std::map<std::string, std::size_t> counts;
    for (const ResultRow &r : rows)
        ++counts[method_name(r.method)];
    CHECK(counts["exhaustive"] == 6);
    CHECK(counts["effpower"] == 12);
    CHECK(counts["aoa"] == 12);
    CHECK(counts["random"] == 12);

    for (const ResultRow &r : rows)
    {
        CHECK(std::isfinite(r.mutual_info));
        CHECK(r.mutual_info >= 0.0);
        CHECK(r.combinations > 0);
        if (r.method == Method::exhaustive)
        {
            CHECK(!r.p.has_value());
            CHECK(r.combinations == 4ULL * 4 * 6 * 6 * 3);
        }
    }
}

TEST_CASE("full-width beam pruning reproduces the exhaustive rows")
{
    ExperimentConfig cfg = small_config();
    cfg.tx_beams = 4;
    cfg.rx_beams = 4;
    cfg.p_values = {4};
    cfg.effpower_sides = EffpowerSides::both;

    const std::vector<ResultRow> rows = run_experiment(cfg);
    for (std::size_t trial = 0; trial < cfg.trials; ++trial)
    {
        const double full = mi_of(rows, Method::exhaustive, std::nullopt, trial, 10.0);
        const double pruned = mi_of(rows, Method::effpower, 4, trial, 10.0);
        CHECK(full == pruned);
    }
}

TEST_CASE("noisy-scored pruning never beats exhaustive and grows with p")
{
    ExperimentConfig cfg = small_config();
    cfg.tx_beams = 8;
    cfg.rx_beams = 6;
    cfg.trials = 10;
    cfg.p_values = {1, 2, 3};
    cfg.scoring = Scoring::noisy;
    cfg.snr_lo_db = cfg.snr_hi_db = 5.0;

    const std::vector<ResultRow> rows = run_experiment(cfg);
    for (std::size_t trial = 0; trial < cfg.trials; ++trial)
    {
        const double full = mi_of(rows, Method::exhaustive, std::nullopt, trial, 5.0);
        const double p1 = mi_of(rows, Method::effpower, 1, trial, 5.0);
        const double p2 = mi_of(rows, Method::effpower, 2, trial, 5.0);
        const double p3 = mi_of(rows, Method::effpower, 3, trial, 5.0);
        CHECK(p1 <= p2 + 1e-12);
        CHECK(p2 <= p3 + 1e-12);
        CHECK(p3 <= full + 1e-12);
    }
}

TEST_CASE("mean mutual information grows with snr for every method")
{
    ExperimentConfig cfg = small_config();
    cfg.methods = {Method::exhaustive, Method::effpower, Method::random_sub};
    cfg.trials = 15;
    cfg.snr_lo_db = 0.0;
    cfg.snr_hi_db = 20.0;
    cfg.snr_step_db = 10.0;

    const std::vector<ResultRow> rows = run_experiment(cfg);
    std::map<std::pair<int, double>, std::pair<double, int>> acc;
    for (const ResultRow &r : rows)
    {
        auto &slot = acc[{static_cast<int>(r.method), r.snr_db}];
        slot.first += r.mutual_info;
        slot.second += 1;
    }
    for (const Method m : cfg.methods)
    {
        double prev = -1.0;
        for (const double snr : {0.0, 10.0, 20.0})
        {
            const auto &slot = acc.at({static_cast<int>(m), snr});
            const double mean = slot.first / slot.second;
            CHECK(mean > prev);
            prev = mean;
        }
    }
}

TEST_CASE("sampled aoa statistics run through the corner arrangement")
{
    ExperimentConfig cfg;
    cfg.rx_subarrays = 3;
    cfg.rx_arrangement = Arrangement::corner;
    cfg.methods = {Method::aoa};
    cfg.p_values = {1};
    cfg.trials = 2;
    cfg.snr_lo_db = cfg.snr_hi_db = 10.0;
    cfg.aoa_d_y = 2.0; // rx panel pitch along y
    cfg.aoa_d_z = 0.5;
    cfg.aoa_instances = 50;

    const std::vector<ResultRow> rows = run_experiment(cfg);
    REQUIRE(rows.size() == 2);
    for (const ResultRow &r : rows)
    {
        CHECK(r.method == Method::aoa);
        CHECK(std::isfinite(r.mutual_info));
        CHECK(r.mutual_info > 0.0);
    }
}

TEST_CASE("reruns are byte identical and csv rows come out canonically ordered")
{
    ExperimentConfig cfg = small_config();
    cfg.methods = {Method::exhaustive, Method::effpower, Method::aoa, Method::random_sub};
    cfg.trials = 2;
    cfg.snr_lo_db = 0.0;
    cfg.snr_hi_db = 10.0;
    cfg.snr_step_db = 10.0;

    const std::vector<ResultRow> a = run_experiment(cfg);
    const std::vector<ResultRow> b = run_experiment(cfg);
    std::stringstream sa, sb;
    write_csv(sa, a);
    write_csv(sb, b);
    CHECK(sa.str() == sb.str());

    std::string header;
    std::getline(sa, header);
    CHECK(header == "snr_db,method,p,trial,mutual_info_bps_hz,combinations,seed");

    // method-major, then p, then snr, then trial; exhaustive prints p as "full"
    std::vector<std::string> lines;
    for (std::string line; std::getline(sa, line);)
        lines.push_back(line);
    REQUIRE(lines.size() == a.size());
    CHECK(lines[0].find("exhaustive,full,") != std::string::npos);
    std::size_t first_eff = 0;
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (lines[i].find(",effpower,") != std::string::npos)
        {
            first_eff = i;
            break;
        }
    for (std::size_t i = 0; i < first_eff; ++i)
        CHECK(lines[i].find(",exhaustive,") != std::string::npos);

    // a different master seed changes the numbers
    cfg.master_seed = 2;
    const std::vector<ResultRow> c = run_experiment(cfg);
    std::stringstream sc;
    write_csv(sc, c);
    CHECK(sc.str() != sb.str());
}

TEST_CASE("summary aggregates per method and references the exhaustive curve")
{
    std::vector<ResultRow> rows;
    // exhaustive baseline: mi = 2 at 0 dB, 4 at 10 dB (two trials each)
    for (std::size_t trial = 0; trial < 2; ++trial)
    {
        rows.push_back({0.0, Method::exhaustive, std::nullopt, trial, 2.0, 100, 1});
        rows.push_back({10.0, Method::exhaustive, std::nullopt, trial, 4.0, 100, 1});
        // a method tracking the baseline exactly: zero gap
        rows.push_back({0.0, Method::effpower, 1, trial, 2.0, 25, 1});
        rows.push_back({10.0, Method::effpower, 1, trial, 4.0, 25, 1});
        // a method 1 bit below at 10 dB: interpolates to 5 dB offset
        rows.push_back({0.0, Method::random_sub, 1, trial, 1.0, 10, 1});
        rows.push_back({10.0, Method::random_sub, 1, trial, 3.0, 10, 1});
    }

    const std::vector<SummaryRow> sum = summarize(rows);
    auto find = [&](Method m, double snr) -> const SummaryRow & {
        for (const SummaryRow &s : sum)
            if (s.method == m && s.snr_db == snr)
                return s;
        REQUIRE(false);
        return sum[0];
    };

    CHECK(find(Method::exhaustive, 0.0).mean_mi == doctest::Approx(2.0));
    CHECK(find(Method::effpower, 0.0).gap_db.value() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(find(Method::effpower, 10.0).gap_db.value() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(find(Method::effpower, 10.0).mi_delta.value() == doctest::Approx(0.0));
    CHECK(find(Method::effpower, 10.0).combo_ratio.value() == doctest::Approx(0.25));
    // mi 3.0 sits halfway up the baseline segment: horizontal gap 5 dB
    CHECK(find(Method::random_sub, 10.0).gap_db.value() == doctest::Approx(5.0).epsilon(1e-9));
    // mi 1.0 lies below the baseline range: no gap defined
    CHECK_FALSE(find(Method::random_sub, 0.0).gap_db.has_value());
    CHECK(find(Method::random_sub, 0.0).mi_delta.value() == doctest::Approx(-1.0));

    // non-exhaustive rows without a baseline cannot be summarized
    std::vector<ResultRow> orphan{{0.0, Method::effpower, 1, 0, 2.0, 25, 1}};
    CHECK_THROWS_AS(summarize(orphan), std::invalid_argument);

    std::stringstream table;
    write_summary(table, sum);
    CHECK(table.str().find("exhaustive") != std::string::npos);
    CHECK(table.str().find("effpower") != std::string::npos);
}

TEST_CASE("combination accounting matches the configured search spaces")
{
    ExperimentConfig cfg; // defaults: 12 tx beams, 8 rx beams, 2x2 subarrays
    cfg.trials = 2;
    cfg.snr_lo_db = cfg.snr_hi_db = 10.0;
    cfg.snr_step_db = 1.0;
    cfg.p_values = {3};
    cfg.methods = {Method::exhaustive, Method::effpower, Method::random_sub};

    const std::vector<ResultRow> rows = run_experiment(cfg);
    for (const ResultRow &r : rows)
    {
        if (r.method == Method::exhaustive)
            CHECK(r.combinations == 27648);
        else
            CHECK(r.combinations == 243);
    }

    const std::vector<SummaryRow> sum = summarize(rows);
    for (const SummaryRow &s : sum)
        if (s.method == Method::effpower)
            CHECK(s.combo_ratio.value() == doctest::Approx(243.0 / 27648.0).epsilon(1e-12));
}
