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

#include "mmbeam/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace mmbeam
{

AnglePair angles_deg(double phi_deg, double theta_deg)
{
    constexpr double rad = two_pi / 360.0;
    return {phi_deg * rad, theta_deg * rad};
}

double angular_distance(const AnglePair &a, const AnglePair &b)
{
    double c = std::cos(a.theta) * std::cos(b.theta) +
               std::sin(a.theta) * std::sin(b.theta) * std::cos(a.phi - b.phi);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

PlanarArray::PlanarArray(std::size_t ny, std::size_t nz, double d) : n_y(ny), n_z(nz), spacing(d)
{
    if (n_y < 1 || n_z < 1)
        throw std::invalid_argument("PlanarArray: need at least one element per axis");
    if (!(spacing > 0.0))
        throw std::invalid_argument("PlanarArray: spacing must be positive");
}

SubarrayLayout::SubarrayLayout(PlanarArray sa, std::vector<SubarrayOffset> off)
    : subarray(sa), offsets(std::move(off))
{
    if (offsets.empty())
        throw std::invalid_argument("SubarrayLayout: need at least one subarray");
    if (offsets[0].d_y != 0.0 || offsets[0].d_z != 0.0)
        throw std::invalid_argument("SubarrayLayout: first offset must be the (0,0) reference");
}

arma::cx_vec steering_vector(const PlanarArray &array, const AnglePair &dir)
{
    const double kd = two_pi * array.spacing;
    const double step_z = kd * std::cos(dir.theta);
    const double step_y = kd * std::sin(dir.theta) * std::sin(dir.phi);
    const double scale = 1.0 / std::sqrt(double(array.size()));

    arma::cx_vec a(array.size());
    std::size_t idx = 0;
    for (std::size_t my = 0; my < array.n_y; my++)
    {
        const double phase_y = double(my) * step_y;
        for (std::size_t mz = 0; mz < array.n_z; mz++)
            a(idx++) = std::polar(scale, phase_y + double(mz) * step_z);
    }
    return a;
}

arma::cx_vec array_response(const SubarrayLayout &layout, const AnglePair &dir)
{
    const arma::cx_vec block = steering_vector(layout.subarray, dir);
    const std::size_t per = block.n_elem;
    const double scale = 1.0 / std::sqrt(double(layout.n_subarrays()));

    arma::cx_vec a(layout.total_antennas());
    for (std::size_t s = 0; s < layout.n_subarrays(); s++)
    {
        const std::complex<double> rot = std::polar(scale, subarray_phase(layout.offsets[s], dir));
        a.subvec(s * per, (s + 1) * per - 1) = rot * block;
    }
    return a;
}

double subarray_phase(const SubarrayOffset &off, const AnglePair &dir)
{
    return two_pi * (off.d_z * std::cos(dir.theta) +
                     off.d_y * std::sin(dir.theta) * std::sin(dir.phi));
}

// Sum of e^{j x m} for m = 0 .. n-1, with the degenerate step handled by its limit.
static std::complex<double> axis_sum(double x, std::size_t n)
{
    const std::complex<double> one(1.0, 0.0);
    const std::complex<double> den = one - std::polar(1.0, x);
    if (std::abs(den) < 1e-12)
        return {double(n), 0.0};
    return (one - std::polar(1.0, x * double(n))) / den;
}

std::complex<double> inner_product_closed_form(const PlanarArray &array, const AnglePair &dir1,
                                               const AnglePair &dir2)
{
    const double kd = two_pi * array.spacing;
    // Conjugating the first vector puts dir2 minus dir1 into the phase steps.
    const double xz = kd * (std::cos(dir2.theta) - std::cos(dir1.theta));
    const double xy = kd * (std::sin(dir2.theta) * std::sin(dir2.phi) -
                            std::sin(dir1.theta) * std::sin(dir1.phi));
    return axis_sum(xz, array.n_z) * axis_sum(xy, array.n_y) / std::sqrt(double(array.size()));
}

GBounds g_bounds(const AnglePair &dir1, const AnglePair &dir2, double kd)
{
    GBounds b;
    const std::complex<double> one(1.0, 0.0);

    const double xz = kd * (std::cos(dir1.theta) - std::cos(dir2.theta));
    const double dz = std::abs(one - std::polar(1.0, xz));
    if (dz >= 1e-12)
        b.g1 = 2.0 / dz;

    const double xy = kd * (std::sin(dir1.theta) * std::sin(dir1.phi) -
                            std::sin(dir2.theta) * std::sin(dir2.phi));
    const double dy = std::abs(one - std::polar(1.0, xy));
    if (dy >= 1e-12)
        b.g2 = 2.0 / dy;

    return b;
}

} // namespace mmbeam
