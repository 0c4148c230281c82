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

#ifndef RAILCHAN_GEOMETRY_HPP
#define RAILCHAN_GEOMETRY_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace railchan
{

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kEpsilon0 = 8.8541878128e-12; // F/m

// Coincidence / endpoint-exclusion tolerance in meters.
inline constexpr double kEpsGeom = 1e-6;

struct Vec2
{
    double x = 0.0, y = 0.0;

    constexpr Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr bool operator==(const Vec2 &) const = default;
};

constexpr double dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2 &a, const Vec2 &b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 &a) { return std::hypot(a.x, a.y); }

struct Vec3
{
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 &operator+=(const Vec3 &o)
    {
        x += o.x, y += o.y, z += o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3 &) const = default;

    constexpr Vec2 xy() const { return {x, y}; }
};

constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }
constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3 &a, const Vec3 &b) { return norm(a - b); }
inline Vec3 normalized(const Vec3 &a) { return a / norm(a); }
inline bool is_finite(const Vec3 &a) { return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z); }

constexpr Vec3 lerp(const Vec3 &a, const Vec3 &b, double t) { return a + (b - a) * t; }

// Azimuth (from +x towards +y) and elevation (above the horizontal plane), radians.
struct Direction
{
    double azimuth = 0.0;
    double elevation = 0.0;
};

Direction direction_of(const Vec3 &v);

// Total length of a polyline.
double polyline_length(std::span<const Vec3> vertices);

// Closest point parameter of a 2D segment intersection, or nullopt when parallel.
// Returns (t, u) with p + t*(q-p) == a + u*(b-a).
std::optional<std::pair<double, double>> intersect_lines_2d(const Vec2 &p, const Vec2 &q, const Vec2 &a, const Vec2 &b);

// Signed area (positive for counterclockwise).
double signed_area(std::span<const Vec2> polygon);

// Crossing-number point in polygon test. Points on the boundary are reported inside.
bool point_in_polygon(std::span<const Vec2> polygon, const Vec2 &p);

// True if no two non-adjacent edges intersect and no adjacent edges overlap.
bool is_simple_polygon(std::span<const Vec2> polygon);

// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

} // namespace railchan

#endif
