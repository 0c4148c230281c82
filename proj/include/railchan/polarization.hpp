// SPDX-License-Identifier: Apache-2.0
//
// railchan - dynamic ray-tracing channel simulator for train-to-infrastructure links
// Copyright (C) 2026 The railchan authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RAILCHAN_POLARIZATION_HPP
#define RAILCHAN_POLARIZATION_HPP

#include "railchan/geometry.hpp"

#include <algorithm>
#include <array>
#include <complex>

namespace railchan
{

using cdouble = std::complex<double>;

enum class Pol
{
    V = 0,
    H = 1,
};

// Polarization pair (receive, transmit). "HV" reads: receive H, transmit V.
struct PolPair
{
    Pol rx = Pol::V;
    Pol tx = Pol::V;
};

inline constexpr PolPair kVV{Pol::V, Pol::V};
inline constexpr PolPair kVH{Pol::V, Pol::H};
inline constexpr PolPair kHV{Pol::H, Pol::V};
inline constexpr PolPair kHH{Pol::H, Pol::H};

// Complex 3-vector, used for field vectors along a ray.
struct CVec3
{
    cdouble x, y, z;

    CVec3() = default;
    CVec3(cdouble x_, cdouble y_, cdouble z_) : x(x_), y(y_), z(z_) {}
    explicit CVec3(const Vec3 &v) : x(v.x), y(v.y), z(v.z) {}

    CVec3 operator+(const CVec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    CVec3 operator*(cdouble s) const { return {x * s, y * s, z * s}; }
};

// Bilinear (non-conjugating) products.
inline cdouble dot(const CVec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline cdouble dot(const CVec3 &a, const CVec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline CVec3 cross(const Vec3 &a, const CVec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline CVec3 scaled(const Vec3 &v, cdouble s) { return {v.x * s, v.y * s, v.z * s}; }

// 2x2 polarimetric transfer matrix, m[rx][tx] with index 0 = V, 1 = H.
struct PolMatrix
{
    std::array<std::array<cdouble, 2>, 2> m{};

    cdouble &operator()(Pol rx, Pol tx) { return m[static_cast<int>(rx)][static_cast<int>(tx)]; }
    const cdouble &operator()(Pol rx, Pol tx) const { return m[static_cast<int>(rx)][static_cast<int>(tx)]; }
    cdouble &operator()(PolPair p) { return (*this)(p.rx, p.tx); }
    const cdouble &operator()(PolPair p) const { return (*this)(p.rx, p.tx); }

    PolMatrix transposed() const
    {
        PolMatrix t;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                t.m[i][j] = m[j][i];
        return t;
    }
    PolMatrix &operator+=(const PolMatrix &o)
    {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                m[i][j] += o.m[i][j];
        return *this;
    }
    PolMatrix operator*(cdouble s) const
    {
        PolMatrix r = *this;
        for (auto &row : r.m)
            for (auto &v : row)
                v *= s;
        return r;
    }
    // Sum of |entry|^2, the polarization-agnostic path power.
    double frobenius2() const
    {
        double s = 0.0;
        for (const auto &row : m)
            for (const auto &v : row)
                s += std::norm(v);
        return s;
    }
    double max_abs() const
    {
        double s = 0.0;
        for (const auto &row : m)
            for (const auto &v : row)
                s = std::max(s, std::abs(v));
        return s;
    }
};

// Spherical unit vectors (theta_hat, phi_hat) of a direction: the V and H bases.
struct PolBasis
{
    Vec3 v;
    Vec3 h;

    const Vec3 &operator[](Pol p) const { return p == Pol::V ? v : h; }
};

PolBasis polarization_basis(const Vec3 &direction);

} // namespace railchan

#endif
