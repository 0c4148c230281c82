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

#include "railchan/geometry.hpp"

#include <algorithm>

namespace railchan
{

Direction direction_of(const Vec3 &v)
{
    const double horiz = std::hypot(v.x, v.y);
    return {std::atan2(v.y, v.x), std::atan2(v.z, horiz)};
}

double polyline_length(std::span<const Vec3> vertices)
{
    double len = 0.0;
    for (std::size_t i = 1; i < vertices.size(); ++i)
        len += distance(vertices[i - 1], vertices[i]);
    return len;
}

std::optional<std::pair<double, double>> intersect_lines_2d(const Vec2 &p, const Vec2 &q, const Vec2 &a, const Vec2 &b)
{
    const Vec2 r = q - p, s = b - a;
    const double denom = cross(r, s);
    if (denom == 0.0)
        return std::nullopt;
    const Vec2 ap = a - p;
    return std::make_pair(cross(ap, s) / denom, cross(ap, r) / denom);
}

double signed_area(std::span<const Vec2> polygon)
{
    double a = 0.0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i)
        a += cross(polygon[i], polygon[(i + 1) % n]);
    return 0.5 * a;
}

static bool on_segment(const Vec2 &a, const Vec2 &b, const Vec2 &p)
{
    if (std::abs(cross(b - a, p - a)) > 1e-12 * (1.0 + norm(b - a) * norm(p - a)))
        return false;
    return dot(p - a, p - b) <= 0.0;
}

bool point_in_polygon(std::span<const Vec2> polygon, const Vec2 &p)
{
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    {
        const Vec2 &a = polygon[i], &b = polygon[j];
        if (on_segment(a, b, p))
            return true;
        if ((a.y > p.y) != (b.y > p.y))
        {
            const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_cross)
                inside = !inside;
        }
    }
    return inside;
}

static int orientation(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

static bool segments_intersect(const Vec2 &p1, const Vec2 &p2, const Vec2 &q1, const Vec2 &q2)
{
    const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4)
        return true;
    if (o1 == 0 && on_segment(p1, p2, q1))
        return true;
    if (o2 == 0 && on_segment(p1, p2, q2))
        return true;
    if (o3 == 0 && on_segment(q1, q2, p1))
        return true;
    if (o4 == 0 && on_segment(q1, q2, p2))
        return true;
    return false;
}

bool is_simple_polygon(std::span<const Vec2> polygon)
{
    const std::size_t n = polygon.size();
    if (n < 3)
        return false;
    for (std::size_t i = 0; i < n; ++i)
        if (polygon[i] == polygon[(i + 1) % n])
            return false;
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 &a = polygon[i], &b = polygon[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j)
        {
            const Vec2 &c = polygon[j], &d = polygon[(j + 1) % n];
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent)
            {
                // Adjacent edges share one vertex; they must not fold back onto each other.
                const Vec2 shared = (j == i + 1) ? b : a;
                const Vec2 other_1 = (j == i + 1) ? a : b;
                const Vec2 other_2 = (j == i + 1) ? d : c;
                if (orientation(other_1, shared, other_2) == 0 && dot(other_1 - shared, other_2 - shared) > 0.0)
                    return false;
                continue;
            }
            if (segments_intersect(a, b, c, d))
                return false;
        }
    }
    return true;
}

double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi)
        a += 2.0 * kPi;
    return a;
}

} // namespace railchan
