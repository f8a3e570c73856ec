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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mmbeam/channel.hpp"
#include "mmbeam/codebook.hpp"
#include "mmbeam/rng.hpp"
#include "mmbeam/sounding.hpp"

namespace mmbeam
{

// Effective-power beam pruning: rank each side's beams by the measurement energy
// they collect, averaged over everything else, and keep only the strongest few for
// the joint search.

// Per-rx-beam average: P(l) = sum_{i,j,bT} |t(i,j,l,bT)|^2 / (n_rx_sa n_tx_sa n_tx_beams).
std::vector<double> effective_power_rx(const MeasurementTensor &t);

// Per-tx-beam average: P(k) = sum_{i,j,bR} |t(i,j,bR,k)|^2 / (n_rx_sa n_tx_sa n_rx_beams).
std::vector<double> effective_power_tx(const MeasurementTensor &t);

// Indices of the p largest values, ties resolved toward the lower index, returned
// in ascending index order. 1 <= p <= powers.size().
std::vector<std::size_t> top_p(std::span<const double> powers, std::size_t p);

// Numerical probe of the large-array behavior behind the pruning rule: with exact
// arrival/departure beams in the codebooks, the effective power of a matched beam
// grows like N^2 per subarray element count N while unmatched beams stay behind,
// so the matched/unmatched power ratio diverges with N.

struct Lemma1Config
{
    std::vector<std::size_t> per_subarray_antennas{16, 64, 256}; // each a perfect square
    std::size_t n_rx_subarrays = 2;
    std::size_t n_tx_subarrays = 2;
    double sigma2 = 0.0; // optional measurement noise on the probe tensors
    std::uint64_t noise_seed = 0;
};

struct Lemma1Row
{
    std::size_t n = 0;     // antennas per subarray
    std::string kind;      // rx_aoa | rx_off | tx_aod | tx_off
    std::size_t beam = 0;  // codebook index
    double p_eff = 0.0;
};

struct Lemma1SizeSummary
{
    std::size_t n = 0;
    double min_matched = 0.0;    // smallest effective power over exact-AoA rx beams
    double max_unmatched = 0.0;  // largest effective power over the other rx beams
    double dominance = 0.0;      // min_matched / max_unmatched
    bool ordering_matches_gains = false; // AoA beam power order == |G|^2 order
};

struct Lemma1Report
{
    std::vector<Lemma1Row> rows;
    std::vector<Lemma1SizeSummary> summary; // one entry per probed N, ascending
};

// Runs the probe for each per-subarray antenna count. Every ray arrival direction
// must appear exactly in rx_cb and every departure direction in tx_cb (within
// 1e-12), otherwise std::invalid_argument. Square per-subarray panels are built at
// each size; subarrays sit side by side along y.
Lemma1Report lemma1_probe(const std::vector<Ray> &rays, const RFCodebook &rx_cb,
                          const RFCodebook &tx_cb, const Lemma1Config &cfg);

// One randomized probe scenario: three static rays with gains 3 to 5 dB apart and
// directions at least 25 degrees apart, plus codebooks holding the exact path
// beams followed by off-path beams (diagonal rings around each path and random
// fill). Every off-path beam keeps a direction-cosine distance of at least 0.15
// from every path on both array axes; a beam that shares one axis coordinate with
// a path keeps a full geometric sum on that axis and its power would grow with N
// instead of staying bounded, which would mask the matched/unmatched separation
// the probe is after.
struct ProbeInstance
{
    std::vector<Ray> rays;
    RFCodebook rx_cb;
    RFCodebook tx_cb;
};

ProbeInstance random_probe_instance(Rng &rng);

// CSV dump of the probe rows: "n,beam_kind,beam_index,p_eff".
void write_probe_csv(std::ostream &os, const Lemma1Report &report);

} // namespace mmbeam
