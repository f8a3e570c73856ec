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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmbeam/channel.hpp"
#include "mmbeam/codebook.hpp"

namespace mmbeam
{

// Monte Carlo experiment driver: draws channel realizations, sounds them across an
// SNR sweep, runs the requested selection strategies, and emits per-trial rows.

enum class Method
{
    exhaustive, // full joint enumeration
    effpower,   // effective-power top-p shortlists per side
    aoa,        // precise Rx steering along estimated arrival directions
    random_sub  // random beam subsets of the same size, the sanity baseline
};

enum class Scoring
{
    genie, // select on noisy measurements, report MI on noiseless ones
    noisy  // report the MI the search itself optimized
};

enum class EffpowerSides
{
    rx,  // shortlist rx beams only; tx side keeps the full codebook
    both // shortlist both sides
};

std::string method_name(Method m);

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Placement of the rx subarrays. "row" puts them side by side along y. "corner"
// puts the first three in an L (reference, +y neighbor, +z neighbor) so the
// sampled angle-of-arrival route has the displacements it needs, and any further
// subarrays continue along y.
enum class Arrangement
{
    row,
    corner,
};

struct ExperimentConfig
{
    // [arrays] panels are rows of identical subarrays placed side by side along y
    std::size_t tx_subarrays = 2;
    std::size_t tx_antennas_y = 8;
    std::size_t tx_antennas_z = 1;
    std::size_t rx_subarrays = 2;
    std::size_t rx_antennas_y = 4;
    std::size_t rx_antennas_z = 1;
    Arrangement rx_arrangement = Arrangement::row;
    double spacing = 0.5; // wavelengths

    // [codebooks] uniform sector-midpoint beams
    std::size_t tx_beams = 12;
    double tx_sector_lo = -1.0471975511965977; // rad, -60 deg
    double tx_sector_hi = 1.0471975511965977;
    std::size_t rx_beams = 8;
    double rx_sector_lo = -1.5707963267948966; // rad, -90 deg
    double rx_sector_hi = 1.5707963267948966;

    // [channel]
    ClusterConfig cluster;

    // [run]
    double snr_lo_db = -10.0;
    double snr_hi_db = 20.0;
    double snr_step_db = 5.0;
    std::size_t trials = 100;
    std::vector<std::size_t> p_values{1, 2, 3};
    std::vector<Method> methods{Method::exhaustive, Method::effpower, Method::aoa,
                                Method::random_sub};
    std::uint64_t master_seed = 1;
    Scoring scoring = Scoring::genie;
    EffpowerSides effpower_sides = EffpowerSides::both;
    double aoa_d_y = 0.5;          // correlation-triple displacements, wavelengths
    double aoa_d_z = 0.5;
    std::size_t aoa_instances = 0; // 0: exact correlation expectations; >0: sampled
    double aoa_dt = 1e-3;          // sampling interval for the sampled route, seconds
};

// Applies one "key = value" setting to the config. Sections and keys follow the
// config-file layout (see load_config). Throws ConfigError on unknown names or
// malformed values.
void apply_setting(ExperimentConfig &cfg, const std::string &section, const std::string &key,
                   const std::string &value);

// Line-oriented config file: "[section]" headers, "key = value" lines, '#' starts
// a comment. Unset keys keep their defaults. Throws ConfigError with the offending
// line number.
ExperimentConfig load_config(std::istream &is);
ExperimentConfig load_config_file(const std::string &path);

// Validates field ranges and cross-field constraints. Throws ConfigError.
void validate(const ExperimentConfig &cfg);

// Derived pieces used by the driver and exposed for tests and tools.
SubarrayLayout tx_layout(const ExperimentConfig &cfg);
SubarrayLayout rx_layout(const ExperimentConfig &cfg);
RFCodebook tx_codebook(const ExperimentConfig &cfg);
RFCodebook rx_codebook(const ExperimentConfig &cfg);
std::vector<double> snr_grid(const ExperimentConfig &cfg);

struct ResultRow
{
    double snr_db = 0.0;
    Method method = Method::exhaustive;
    std::optional<std::size_t> p;    // empty for exhaustive, printed as "full"
    std::size_t trial = 0;
    double mutual_info = 0.0;        // bits/s/Hz
    std::uint64_t combinations = 0;  // scored by the search that produced the row
    std::uint64_t seed = 0;          // the per-trial derived seed
};

// Runs the full sweep: per trial, derive trial_seed = derive_key(master_seed, trial),
// draw one realization, sound it per SNR point (sigma2 = 10^(-snr/10) against the
// unit channel energy), run every requested method and p. Row production order is
// trial-major; write_csv sorts canonically. Propagates ResourceCapError from the
// exhaustive enumeration.
std::vector<ResultRow> run_experiment(const ExperimentConfig &cfg);

// CSV with header "snr_db,method,p,trial,mutual_info_bps_hz,combinations,seed" and
// rows sorted by (method, p, snr, trial). Values print with 12 significant digits.
void write_csv(std::ostream &os, std::span<const ResultRow> rows);

struct SummaryRow
{
    Method method = Method::exhaustive;
    std::optional<std::size_t> p;
    double snr_db = 0.0;
    double mean_mi = 0.0;
    double mean_combinations = 0.0;
    std::optional<double> mi_delta;     // mean_mi minus the exhaustive mean at this SNR
    std::optional<double> gap_db;       // horizontal offset to the exhaustive curve
    std::optional<double> combo_ratio;  // mean_combinations / exhaustive mean
};

// Per-(method, p, snr) means plus the dB gap to the exhaustive baseline, computed
// as the horizontal offset at equal mean MI by piecewise-linear interpolation of
// the exhaustive curve (needs >= 2 baseline points and an MI inside its range).
// Throws std::invalid_argument when non-exhaustive rows are present but no
// exhaustive baseline is.
std::vector<SummaryRow> summarize(std::span<const ResultRow> rows);

// Human-readable summary table.
void write_summary(std::ostream &os, std::span<const SummaryRow> rows);

} // namespace mmbeam
