// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "mmbeam/aoa.hpp"
#include "mmbeam/rng.hpp"

using namespace mmbeam;
using cx = std::complex<double>;

namespace
{

constexpr double pi = two_pi / 2.0;

// Three 2x2 rx tiles in an L: displacements (0.5, 0) and (0, 0.5) from the
// reference, matching the default SubarrayTriple.
ChannelRealization triple_channel(std::vector<Ray> rays)
{
    const SubarrayLayout rx(PlanarArray(2, 2, 0.25), {{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}});
    const SubarrayLayout tx(PlanarArray(4, 1, 0.5), {{0.0, 0.0}, {2.0, 0.0}});
    return ChannelRealization{std::move(rays), tx, rx};
}

Ray make_ray(double mag, double phase, double doppler, AnglePair aoa, AnglePair aod)
{
    Ray r;
    r.gain_magnitude = mag;
    r.initial_phase = phase;
    r.doppler_hz = doppler;
    r.aoa = aoa;
    r.aod = aod;
    return r;
}

} // namespace

TEST_CASE("phase unwrapping pulls the wrapped value next to the reference")
{
    CHECK(unwrap_phase(-3.0, 3.2) == doctest::Approx(-3.0 + two_pi).epsilon(1e-12));
    CHECK(unwrap_phase(3.0, 3.2) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(unwrap_phase(0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(unwrap_phase(0.0, 2.0 * pi) == doctest::Approx(two_pi).epsilon(1e-12));
    CHECK(unwrap_phase(-0.1, -7.0) == doctest::Approx(-0.1 - two_pi).epsilon(1e-12));
    // the result is always within half a period of the reference
    Rng rng(3);
    for (int i = 0; i < 200; ++i)
    {
        const double w = rng.uniform(-pi, pi);
        const double e = rng.uniform(-20.0, 20.0);
        const double u = unwrap_phase(w, e);
        CHECK(std::abs(u - e) <= pi + 1e-9);
        CHECK(std::abs(std::remainder(u - w, two_pi)) < 1e-9);
    }
    CHECK_THROWS_AS(unwrap_phase(4.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(unwrap_phase(0.1, 0.0, -1.0), std::invalid_argument);
    // custom period
    CHECK(unwrap_phase(0.2, 1.1, 1.0) == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("analytic statistics of a single ray decode its direction exactly")
{
    const AnglePair truth = angles_deg(20.0, 60.0);
    const Ray r = make_ray(0.8, 0.3, 12.0, truth, angles_deg(-10.0, 90.0));
    const ChannelRealization ch = triple_channel({r});
    const SubarrayTriple triple; // (0,1,2) at d = 0.5
    const RFCodebook rx_cb = uniform_codebook(-pi / 2, pi / 2, 8);
    const RFCodebook tx_cb = uniform_codebook(-pi / 3, pi / 3, 4);

    const CorrelationStats stats = analytic_stats(ch, triple, tx_cb, rx_cb, 0.0);
    CHECK(stats.instances == 0);
    CHECK_FALSE(stats.degenerate_doppler);

    // expected correlation phases for d = lambda/2
    const CorrelationEntry &e = stats.at(0, 0);
    CHECK(std::arg(e.c31) == doctest::Approx(pi * std::cos(truth.theta)).epsilon(1e-9));
    CHECK(std::arg(e.c21) ==
          doctest::Approx(pi * std::sin(truth.theta) * std::sin(truth.phi)).epsilon(1e-9));

    const AoAReport rep = estimate_aoas(stats, triple, rx_cb, 1);
    REQUIRE(rep.estimates.size() == 1);
    CHECK(rep.estimates[0].direction.theta == doctest::Approx(truth.theta).epsilon(1e-9));
    CHECK(rep.estimates[0].direction.phi == doctest::Approx(truth.phi).epsilon(1e-9));
    CHECK(rep.discarded == 0);
    CHECK(rep.skipped == 0);
}

TEST_CASE("sampled statistics converge to the analytic ones")
{
    const std::vector<Ray> rays{
        make_ray(0.7, 0.4, 7.0, angles_deg(35.0, 70.0), angles_deg(10.0, 90.0)),
        make_ray(0.5, 2.1, 19.0, angles_deg(-20.0, 100.0), angles_deg(-30.0, 90.0)),
        make_ray(0.3, 4.0, 41.0, angles_deg(5.0, 55.0), angles_deg(25.0, 90.0))};
    const ChannelRealization ch = triple_channel(rays);
    const SubarrayTriple triple;
    const RFCodebook rx_cb = uniform_codebook(-pi / 2, pi / 2, 4);
    const RFCodebook tx_cb = uniform_codebook(-pi / 3, pi / 3, 3);

    std::vector<double> times(2000);
    for (std::size_t l = 0; l < times.size(); ++l)
        times[l] = static_cast<double>(l) * 1e-3;

    const CorrelationStats emp = accumulate_stats(ch, triple, tx_cb, rx_cb, times,
                                                  NoiseModel{0.0, 1});
    const CorrelationStats ana = analytic_stats(ch, triple, tx_cb, rx_cb, 0.0);
    CHECK(emp.instances == times.size());

    const auto [jt, kt] = top_pairs(ana, 1)[0];
    const CorrelationEntry &ea = ana.at(jt, kt);
    const CorrelationEntry &ee = emp.at(jt, kt);
    CHECK(std::abs(ee.p_avg - ea.p_avg) / ea.p_avg < 0.05);
    CHECK(std::abs(ee.c21 - ea.c21) / ea.p_avg < 0.1);
    CHECK(std::abs(ee.c31 - ea.c31) / ea.p_avg < 0.1);
}

TEST_CASE("pure-noise samples average to the noise variance with no correlation")
{
    const ChannelRealization ch = triple_channel({});
    const SubarrayTriple triple;
    const RFCodebook one{{angles_deg(0.0, 90.0)}};
    std::vector<double> times(5000);
    for (std::size_t l = 0; l < times.size(); ++l)
        times[l] = static_cast<double>(l) * 1e-3;

    const double sigma2 = 0.3;
    const CorrelationStats emp =
        accumulate_stats(ch, triple, one, one, times, NoiseModel{sigma2, 9});
    const CorrelationEntry &e = emp.at(0, 0);
    CHECK(std::abs(e.p_avg - sigma2) < 0.1 * sigma2);
    CHECK(std::abs(e.c21) < 0.02);
    CHECK(std::abs(e.c31) < 0.02);

    // the analytic route gives the exact expectations
    const CorrelationStats ana = analytic_stats(ch, triple, one, one, sigma2);
    CHECK(ana.at(0, 0).p_avg == doctest::Approx(sigma2).epsilon(1e-15));
    CHECK(std::abs(ana.at(0, 0).c21) == 0.0);
    CHECK(std::abs(ana.at(0, 0).c31) == 0.0);
}

TEST_CASE("analytic route flags a shared doppler rate")
{
    const AnglePair aod = angles_deg(0.0, 90.0);
    const std::vector<Ray> shared{
        make_ray(0.7, 0.0, 25.0, angles_deg(10.0, 80.0), aod),
        make_ray(0.5, 1.0, 25.0, angles_deg(-15.0, 95.0), aod)};
    const std::vector<Ray> distinct{
        make_ray(0.7, 0.0, 25.0, angles_deg(10.0, 80.0), aod),
        make_ray(0.5, 1.0, 26.0, angles_deg(-15.0, 95.0), aod)};
    const SubarrayTriple triple;
    const RFCodebook one{{angles_deg(0.0, 90.0)}};
    CHECK(analytic_stats(triple_channel(shared), triple, one, one, 0.0).degenerate_doppler);
    CHECK_FALSE(
        analytic_stats(triple_channel(distinct), triple, one, one, 0.0).degenerate_doppler);
}

TEST_CASE("estimator processes the strongest pairs with skip, merge, and discard")
{
    // hand-built statistics: 1 tx beam, 4 rx beams; the first two beams sit close
    // enough to the truth that the phase unwrap lands inside its half-period
    const RFCodebook rx_cb{{angles_deg(30.0, 90.0), angles_deg(20.0, 90.0),
                            angles_deg(0.0, 90.0), angles_deg(50.0, 90.0)}};
    const SubarrayTriple triple; // d_y = d_z = 0.5, kd = pi
    const AnglePair truth = angles_deg(40.0, 75.0);

    CorrelationStats stats;
    stats.n_tx_beams = 1;
    stats.n_rx_beams = 4;
    stats.entries.resize(4);
    const cx c21 = std::polar(1.0, pi * std::sin(truth.theta) * std::sin(truth.phi));
    const cx c31 = std::polar(1.0, pi * std::cos(truth.theta));
    stats.at(0, 0) = CorrelationEntry{9.0, 9.0 * c21, 9.0 * c31}; // decodes to truth
    stats.at(0, 1) = CorrelationEntry{7.0, 7.0 * c21, 7.0 * c31}; // same direction: merged
    stats.at(0, 2) = CorrelationEntry{5.0, cx(0.0, 0.0), 5.0 * c31}; // |c21| = 0: skipped
    stats.at(0, 3) = CorrelationEntry{1.0, 1.0 * c21, 1.0 * c31};    // beyond p: untouched

    const AoAReport rep = estimate_aoas(stats, triple, rx_cb, 3);
    REQUIRE(rep.estimates.size() == 1);
    CHECK(rep.estimates[0].direction.phi == doctest::Approx(truth.phi).epsilon(1e-9));
    CHECK(rep.estimates[0].direction.theta == doctest::Approx(truth.theta).epsilon(1e-9));
    CHECK(rep.estimates[0].rx_beam == 0);
    CHECK(rep.estimates[0].power == 9.0);
    CHECK(rep.merged == 1);
    CHECK(rep.skipped == 1);
    CHECK(rep.discarded == 0);
}

TEST_CASE("estimates outside the physical region are discarded, not clamped")
{
    // rx beam at theta = 0 pushes the elevation unwrap to 1.1*pi: |cos| > 1
    const RFCodebook rx_cb{{AnglePair{0.0, 0.0}}};
    const SubarrayTriple triple;
    CorrelationStats stats;
    stats.n_tx_beams = 1;
    stats.n_rx_beams = 1;
    stats.entries.resize(1);
    stats.at(0, 0) = CorrelationEntry{4.0, cx(1.0, 0.0), std::polar(1.0, -0.9 * pi)};

    CHECK_THROWS_WITH_AS(estimate_aoas(stats, triple, rx_cb, 1),
                         doctest::Contains("1 discarded"), std::runtime_error);
}

TEST_CASE("strongest-pair ordering breaks ties toward lower beam indices")
{
    CorrelationStats stats;
    stats.n_tx_beams = 2;
    stats.n_rx_beams = 2;
    stats.entries.resize(4);
    stats.at(0, 0) = CorrelationEntry{2.0, {}, {}};
    stats.at(0, 1) = CorrelationEntry{5.0, {}, {}};
    stats.at(1, 0) = CorrelationEntry{5.0, {}, {}};
    stats.at(1, 1) = CorrelationEntry{7.0, {}, {}};

    const auto pairs = top_pairs(stats, 3);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK(pairs[1] == std::pair<std::size_t, std::size_t>{0, 1}); // tie: lower linear index
    CHECK(pairs[2] == std::pair<std::size_t, std::size_t>{1, 0});
    CHECK_THROWS_AS(top_pairs(stats, 0), std::invalid_argument);
    CHECK_THROWS_AS(top_pairs(stats, 5), std::invalid_argument);
}

TEST_CASE("estimates from random channels stay in the visible region")
{
    const SubarrayTriple triple;
    const RFCodebook rx_cb = uniform_codebook(-pi / 2, pi / 2, 8);
    const RFCodebook tx_cb = uniform_codebook(-pi / 3, pi / 3, 4);
    ClusterConfig cc;
    cc.n_clusters = 1;
    cc.rays_per_cluster = 8;
    cc.aoa_elevation = AngleInterval{0.9, 2.2};
    cc.ray_spread = 0.03;

    const SubarrayLayout rx(PlanarArray(2, 2, 0.25), {{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}});
    const SubarrayLayout tx(PlanarArray(4, 1, 0.5), {{0.0, 0.0}, {2.0, 0.0}});

    Rng rng(77);
    for (int i = 0; i < 30; ++i)
    {
        const ChannelRealization ch = draw_realization(cc, tx, rx, rng);
        const CorrelationStats stats = analytic_stats(ch, triple, tx_cb, rx_cb, 0.01);
        const AoAReport rep = estimate_aoas(stats, triple, rx_cb, 3);
        REQUIRE(!rep.estimates.empty());
        for (const AoAEstimate &e : rep.estimates)
        {
            CHECK(e.direction.phi >= -pi / 2 - 1e-12);
            CHECK(e.direction.phi <= pi / 2 + 1e-12);
            CHECK(e.direction.theta >= -1e-12);
            CHECK(e.direction.theta <= pi + 1e-12);
            CHECK(e.power > 0.0);
        }
        // strongest first
        for (std::size_t k = 1; k < rep.estimates.size(); ++k)
            CHECK(rep.estimates[k - 1].power >= rep.estimates[k].power);
    }
}

TEST_CASE("averaging statistics is elementwise and shape checked")
{
    CorrelationStats a, b;
    for (CorrelationStats *s : {&a, &b})
    {
        s->n_tx_beams = 1;
        s->n_rx_beams = 2;
        s->entries.resize(2);
        s->instances = 100;
    }
    a.at(0, 0) = CorrelationEntry{2.0, cx(1.0, 0.0), cx(0.0, 1.0)};
    b.at(0, 0) = CorrelationEntry{4.0, cx(3.0, 0.0), cx(0.0, -1.0)};
    a.at(0, 1) = CorrelationEntry{1.0, cx(0.5, 0.5), cx(0.5, 0.0)};
    b.at(0, 1) = CorrelationEntry{3.0, cx(1.5, -0.5), cx(0.0, 0.0)};

    const std::vector<CorrelationStats> parts{a, b};
    const CorrelationStats avg = average_stats(parts);
    CHECK(avg.at(0, 0).p_avg == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(std::abs(avg.at(0, 0).c21 - cx(2.0, 0.0)) < 1e-15);
    CHECK(std::abs(avg.at(0, 0).c31) < 1e-15);
    CHECK(avg.at(0, 1).p_avg == doctest::Approx(2.0).epsilon(1e-15));

    CorrelationStats c = b;
    c.n_rx_beams = 1;
    c.entries.resize(1);
    const std::vector<CorrelationStats> bad{a, c};
    CHECK_THROWS_AS(average_stats(bad), std::invalid_argument);
    CHECK_THROWS_AS(average_stats(std::vector<CorrelationStats>{}), std::invalid_argument);
}

TEST_CASE("triple validation rejects inconsistent geometry")
{
    const ChannelRealization ch =
        triple_channel({make_ray(1.0, 0.0, 5.0, angles_deg(0.0, 90.0), angles_deg(0.0, 90.0))});
    const RFCodebook one{{angles_deg(0.0, 90.0)}};
    const std::vector<double> times{0.0, 1e-3};

    SubarrayTriple wrong_d;
    wrong_d.d_y = 0.7; // layout has 0.5
    CHECK_THROWS_AS(accumulate_stats(ch, wrong_d, one, one, times, NoiseModel{}),
                    std::invalid_argument);

    SubarrayTriple dup;
    dup.y_index = 0;
    CHECK_THROWS_AS(accumulate_stats(ch, dup, one, one, times, NoiseModel{}),
                    std::invalid_argument);

    SubarrayTriple oob;
    oob.z_index = 9;
    CHECK_THROWS_AS(accumulate_stats(ch, oob, one, one, times, NoiseModel{}),
                    std::invalid_argument);

    CHECK_THROWS_AS(accumulate_stats(ch, SubarrayTriple{}, one, one, {}, NoiseModel{}),
                    std::invalid_argument);
}

TEST_CASE("steer candidates extracts directions in order")
{
    const std::vector<AoAEstimate> est{{angles_deg(10.0, 80.0), 0, 1, 5.0},
                                       {angles_deg(-20.0, 95.0), 1, 2, 3.0}};
    const std::vector<AnglePair> dirs = steer_candidates(est);
    REQUIRE(dirs.size() == 2);
    CHECK(dirs[0] == est[0].direction);
    CHECK(dirs[1] == est[1].direction);
    CHECK_THROWS_AS(steer_candidates(std::vector<AoAEstimate>{}), std::invalid_argument);
}
