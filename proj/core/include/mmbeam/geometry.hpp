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

#include <armadillo>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace mmbeam
{

// Array geometry and steering responses.
//
// All lengths are in carrier wavelengths; the wavenumber never appears on its own,
// only as k*d = 2*pi*spacing. Elements and subarrays lie in the y-z plane. A
// direction is (phi, theta) with phi the azimuth measured from the x axis in the
// x-y plane and theta the elevation measured from the z axis, so broadside is
// (0, pi/2). The phase reference is element (1,1) of the reference subarray.

inline constexpr double two_pi = 6.283185307179586476925286766559;

struct AnglePair
{
    double phi = 0.0;   // azimuth, rad
    double theta = 0.0; // elevation from the z axis, rad

    bool operator==(const AnglePair &) const = default;
};

// Convenience constructor for tests and tools.
AnglePair angles_deg(double phi_deg, double theta_deg);

// Great-circle angle in radians between two directions.
double angular_distance(const AnglePair &a, const AnglePair &b);

// Uniform rectangular panel in the y-z plane: n_y columns spaced along y, n_z rows
// spaced along z, common element spacing in wavelengths. A linear array along y is
// the n_z = 1 case.
struct PlanarArray
{
    PlanarArray(std::size_t n_y, std::size_t n_z, double spacing);

    std::size_t n_y;
    std::size_t n_z;
    double spacing; // element pitch, wavelengths

    std::size_t size() const { return n_y * n_z; }
};

// Position of a subarray's reference element relative to the array origin.
struct SubarrayOffset
{
    double d_y = 0.0; // wavelengths
    double d_z = 0.0; // wavelengths
};

// A transceiver panel made of identical subarrays, one RF chain each. The first
// offset must be (0,0); it is the phase reference for the whole panel.
struct SubarrayLayout
{
    SubarrayLayout(PlanarArray subarray, std::vector<SubarrayOffset> offsets);

    PlanarArray subarray;
    std::vector<SubarrayOffset> offsets;

    std::size_t n_subarrays() const { return offsets.size(); }
    std::size_t total_antennas() const { return offsets.size() * subarray.size(); }
};

// Unit-norm steering vector of one panel toward `dir`. Element (m_y, m_z) of the
// panel (1-based) carries phase k*d*((m_z-1)*cos(theta) + (m_y-1)*sin(theta)*sin(phi)).
// Storage order is z-fastest: index = (m_y-1)*n_z + (m_z-1).
arma::cx_vec steering_vector(const PlanarArray &array, const AnglePair &dir);

// Unit-norm steering vector of a full layout, assembled per subarray: block s equals
// exp(j*subarray_phase(offsets[s], dir)) * steering_vector(subarray, dir) / sqrt(S).
arma::cx_vec array_response(const SubarrayLayout &layout, const AnglePair &dir);

// Phase advance of a subarray displaced by `off` toward `dir`:
// 2*pi*(d_z*cos(theta) + d_y*sin(theta)*sin(phi)).
double subarray_phase(const SubarrayOffset &off, const AnglePair &dir);

// Closed form for sqrt(N) * steering_vector(dir1)^H steering_vector(dir2), evaluated
// as the product of two geometric sums (one per axis). Each axis sum falls back to
// its limit value n_z (resp. n_y) when |1 - e^{jx}| < 1e-12, which covers both the
// equal-angle case and grating-lobe aliases where the phase step is a multiple of
// 2*pi. Equals the direct conjugate dot product up to rounding.
std::complex<double> inner_product_closed_form(const PlanarArray &array, const AnglePair &dir1,
                                               const AnglePair &dir2);

// Size-independent envelopes of the two axis sums: 2/|1 - e^{j k d (cos t1 - cos t2)}|
// and 2/|1 - e^{j k d (sin t1 sin p1 - sin t2 sin p2)}|. A vanishing denominator means
// the corresponding sum has no size-independent bound; that component is left empty.
struct GBounds
{
    std::optional<double> g1; // elevation axis
    std::optional<double> g2; // azimuth axis
};

GBounds g_bounds(const AnglePair &dir1, const AnglePair &dir2, double kd);

} // namespace mmbeam
