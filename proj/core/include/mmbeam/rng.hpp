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

#include <complex>
#include <cstdint>

namespace mmbeam
{

// Deterministic random number generation for the whole simulator.
//
// Everything is built on splitmix64, used in two roles:
//   1. as a sequential stream generator (class Rng below), and
//   2. as a key mixer for deriving independent child streams and for counter-mode
//      draws indexed by an entry number (derive_key / counter_normal_pair).
// Draws therefore depend only on (seed, stream id, counter), never on evaluation
// order, so serial and parallel sweeps produce identical output. Distributions are
// implemented here (Box-Muller, inverse CDF) instead of <random> because the
// standard distributions are implementation defined and would break cross-toolchain
// reproducibility of frozen test values.

// One splitmix64 step: advances the state and returns a mixed 64-bit value.
std::uint64_t splitmix64_next(std::uint64_t &state);

// Derives an independent stream key from a parent key and a stream index.
std::uint64_t derive_key(std::uint64_t parent, std::uint64_t stream);

// Sequential generator with value semantics.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    // Child generator whose draws are independent of this one and of siblings.
    // Forking depends on the construction seed only, not on how many values
    // were already drawn, so callers may fork in any order.
    Rng fork(std::uint64_t stream) const { return Rng(derive_key(seed_, stream)); }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double normal();                       // standard normal, Box-Muller
    double exponential(double mean);
    double laplace(double scale);          // zero mean, inverse CDF
    double rayleigh(double sigma);         // mode sigma, E[X^2] = 2 sigma^2

    // Circularly symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance);

  private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

// Counter-mode standard normal pair for entry-indexed noise. The result is a pure
// function of (key, counter), which keeps additive noise independent of the order
// in which tensor entries are filled.
void counter_normal_pair(std::uint64_t key, std::uint64_t counter, double &g0, double &g1);

} // namespace mmbeam
