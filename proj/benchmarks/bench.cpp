// SPDX-License-Identifier: Apache-2.0
//
// Micro benchmarks for the hot paths: steering-vector assembly, the two inner
// product routes, the two sounding routes, and the joint search with and
// without beam pruning.

#include <benchmark/benchmark.h>

#include "mmbeam/beamsel.hpp"
#include "mmbeam/channel.hpp"
#include "mmbeam/codebook.hpp"
#include "mmbeam/geometry.hpp"
#include "mmbeam/harness.hpp"
#include "mmbeam/search.hpp"
#include "mmbeam/sounding.hpp"

namespace
{

using namespace mmbeam;

PlanarArray square_panel(std::size_t n_antennas)
{
    std::size_t side = 1;
    while (side * side < n_antennas)
        ++side;
    return PlanarArray(side, side, 0.5);
}

void BM_SteeringVector(benchmark::State &state)
{
    const PlanarArray panel = square_panel(static_cast<std::size_t>(state.range(0)));
    const AnglePair dir = angles_deg(25.0, 80.0);
    for (auto _ : state)
    {
        arma::cx_vec v = steering_vector(panel, dir);
        benchmark::DoNotOptimize(v.memptr());
    }
}
BENCHMARK(BM_SteeringVector)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_InnerProductClosedForm(benchmark::State &state)
{
    const PlanarArray panel = square_panel(static_cast<std::size_t>(state.range(0)));
    const AnglePair d1 = angles_deg(25.0, 80.0);
    const AnglePair d2 = angles_deg(-40.0, 95.0);
    for (auto _ : state)
    {
        std::complex<double> v = inner_product_closed_form(panel, d1, d2);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_InnerProductClosedForm)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_InnerProductDirect(benchmark::State &state)
{
    const PlanarArray panel = square_panel(static_cast<std::size_t>(state.range(0)));
    const AnglePair d1 = angles_deg(25.0, 80.0);
    const AnglePair d2 = angles_deg(-40.0, 95.0);
    for (auto _ : state)
    {
        std::complex<double> v = std::sqrt(static_cast<double>(panel.size())) *
                                 arma::cdot(steering_vector(panel, d1), steering_vector(panel, d2));
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_InnerProductDirect)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

// default experiment geometry: 2 tx subarrays of 8x1, 2 rx subarrays of 4x1,
// 12 tx beams, 8 rx beams, 4 clusters x 5 rays
struct Scenario
{
    ExperimentConfig cfg;
    SubarrayLayout tx;
    SubarrayLayout rx;
    RFCodebook tx_cb;
    RFCodebook rx_cb;
    ChannelRealization ch;
    arma::cx_mat h;

    Scenario() : tx(tx_layout(cfg)), rx(rx_layout(cfg)), tx_cb(tx_codebook(cfg)),
                 rx_cb(rx_codebook(cfg)), ch([this] {
                     Rng rng(12345);
                     return draw_realization(cfg.cluster, tx, rx, rng);
                 }()),
                 h(channel_matrix(ch))
    {
    }
};

const Scenario &scenario()
{
    static const Scenario s;
    return s;
}

void BM_MeasureDirect(benchmark::State &state)
{
    const Scenario &s = scenario();
    for (auto _ : state)
    {
        MeasurementTensor t = measure_direct(s.h, s.tx, s.rx, s.tx_cb, s.rx_cb);
        benchmark::DoNotOptimize(t.data().data());
    }
}
BENCHMARK(BM_MeasureDirect);

void BM_MeasureRayExpansion(benchmark::State &state)
{
    const Scenario &s = scenario();
    for (auto _ : state)
    {
        MeasurementTensor t = measure_ray_expansion(s.ch, s.tx_cb, s.rx_cb);
        benchmark::DoNotOptimize(t.data().data());
    }
}
BENCHMARK(BM_MeasureRayExpansion);

void BM_ExhaustiveSearch(benchmark::State &state)
{
    const Scenario &s = scenario();
    const MeasurementTensor t = measure_ray_expansion(s.ch, s.tx_cb, s.rx_cb);
    const BBCodebook bb = default_bb_codebook();
    for (auto _ : state)
    {
        SearchResult r = exhaustive_search(t, bb, 0.1);
        benchmark::DoNotOptimize(r.mutual_info);
    }
}
BENCHMARK(BM_ExhaustiveSearch);

void BM_PrunedSearchP3(benchmark::State &state)
{
    const Scenario &s = scenario();
    const MeasurementTensor t = measure_ray_expansion(s.ch, s.tx_cb, s.rx_cb);
    const BBCodebook bb = default_bb_codebook();
    for (auto _ : state)
    {
        const std::vector<std::size_t> rx_keep = top_p(effective_power_rx(t), 3);
        const std::vector<std::size_t> tx_keep = top_p(effective_power_tx(t), 3);
        SearchResult r = restricted_search(t, bb, 0.1, rx_keep, tx_keep);
        benchmark::DoNotOptimize(r.mutual_info);
    }
}
BENCHMARK(BM_PrunedSearchP3);

} // namespace

BENCHMARK_MAIN();
