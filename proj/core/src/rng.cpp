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

#include "mmbeam/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mmbeam
{

std::uint64_t splitmix64_next(std::uint64_t &state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_key(std::uint64_t parent, std::uint64_t stream)
{
    // Two mixing rounds over (parent, stream) so that related parents and small
    // stream indices do not produce correlated keys.
    std::uint64_t s = parent + 0x9E3779B97F4A7C15ULL * (stream + 1);
    std::uint64_t a = splitmix64_next(s);
    s ^= a;
    return splitmix64_next(s);
}

// 53-bit mantissa in [0, 1)
static double to_unit_double(std::uint64_t x) { return double(x >> 11) * 0x1.0p-53; }

double Rng::uniform() { return to_unit_double(next_u64()); }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal()
{
    // Box-Muller, cosine branch. u1 is kept away from zero for the log.
    double u1 = 0.0;
    do
        u1 = uniform();
    while (u1 <= 0.0);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double mean)
{
    if (mean <= 0.0)
        throw std::invalid_argument("Rng::exponential: mean must be positive");
    double u = 0.0;
    do
        u = uniform();
    while (u <= 0.0);
    return -mean * std::log(u);
}

double Rng::laplace(double scale)
{
    if (scale < 0.0)
        throw std::invalid_argument("Rng::laplace: scale must be nonnegative");
    if (scale == 0.0)
        return 0.0;
    double u = uniform() - 0.5; // (-0.5, 0.5)
    double a = 1.0 - 2.0 * std::abs(u);
    if (a <= 0.0)
        a = 0x1.0p-53;
    double mag = -scale * std::log(a);
    return u < 0.0 ? -mag : mag;
}

double Rng::rayleigh(double sigma)
{
    if (sigma < 0.0)
        throw std::invalid_argument("Rng::rayleigh: sigma must be nonnegative");
    double u = 0.0;
    do
        u = uniform();
    while (u <= 0.0);
    return sigma * std::sqrt(-2.0 * std::log(u));
}

std::complex<double> Rng::complex_normal(double variance)
{
    if (variance < 0.0)
        throw std::invalid_argument("Rng::complex_normal: variance must be nonnegative");
    double s = std::sqrt(variance / 2.0);
    double re = normal();
    double im = normal();
    return {s * re, s * im};
}

void counter_normal_pair(std::uint64_t key, std::uint64_t counter, double &g0, double &g1)
{
    std::uint64_t s = derive_key(key, counter);
    double u1 = 0.0;
    do
        u1 = to_unit_double(splitmix64_next(s));
    while (u1 <= 0.0);
    double u2 = to_unit_double(splitmix64_next(s));
    double r = std::sqrt(-2.0 * std::log(u1));
    g0 = r * std::cos(2.0 * std::numbers::pi * u2);
    g1 = r * std::sin(2.0 * std::numbers::pi * u2);
}

} // namespace mmbeam
