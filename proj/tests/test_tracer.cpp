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

#include "railchan/tracer.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>

using namespace railchan;
using Catch::Approx;

namespace
{

const CarrierConfig kCarrier{1.9e9};

Building slab(int id, double x0, double y0, double x1, double y1, double h)
{
    return Building{id, {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, h, Material{}};
}

double db20(double v)
{
    return 20.0 * std::log10(v);
}

// Received VV amplitude relative to free space over the direct distance.
double excess_db(const RayPath &p, double direct)
{
    return db20(std::abs(p.transfer(kVV)) * 4.0 * kPi * direct / kCarrier.wavelength());
}

double knife_edge_db(double h, double d1, double d2)
{
    return db20(std::abs(knife_edge_diffraction(knife_edge_v(h, d1, d2, kCarrier.wavelength()))));
}

Scene preset_scene()
{
    return load_scene_file(std::string(RAILCHAN_PRESET_DIR) + "/urban_canyon/scene.json");
}

} // namespace

TEST_CASE("two parallel walls give LOS, two single and two double reflections", "[tracer]")
{
    const Scene scene({slab(1, -500, 10, 500, 20, 30), slab(2, -500, -20, 500, -10, 30)}, {});
    TraceLimits limits;
    limits.max_vertical_diffractions = 0;
    limits.rooftop = false;
    const Vec3 tx{-20, 0, 5}, rx{20, 2, 5};
    const auto paths = trace_specular(scene, tx, rx, kCarrier, limits);
    REQUIRE(paths.size() == 5);

    std::map<std::string, double> expected{
        {"LOS", std::hypot(40.0, 2.0)},
        {"R(b1.0)", std::hypot(40.0, 18.0)},
        {"R(b2.2)", std::hypot(40.0, 22.0)},
        {"R(b1.0)>R(b2.2)", std::hypot(40.0, 42.0)},
        {"R(b2.2)>R(b1.0)", std::hypot(40.0, 38.0)},
    };
    for (const auto &p : paths)
    {
        const std::string sig = to_string(p.signature());
        INFO(sig);
        REQUIRE(expected.count(sig) == 1);
        CHECK(std::abs(p.length - expected[sig]) < 1e-9);
        CHECK(p.delay == Approx(p.length / kSpeedOfLight).epsilon(1e-15));
        CHECK(p.vertices.front() == tx);
        CHECK(p.vertices.back() == rx);
        // Reflection points lie on the wall planes and obey the mirror law.
        for (std::size_t i = 0; i < p.interactions.size(); ++i)
        {
            const Vec3 &q = p.vertices[i + 1];
            CHECK((std::abs(q.y - 10.0) < 1e-9 || std::abs(q.y + 10.0) < 1e-9));
            const Vec3 in = normalized(q - p.vertices[i]);
            const Vec3 out = normalized(p.vertices[i + 2] - q);
            CHECK(in.x == Approx(out.x));
            CHECK(in.y == Approx(-out.y));
            CHECK(in.z == Approx(out.z));
        }
        if (!p.interactions.empty())
            CHECK(std::abs(p.transfer(kVV)) < std::abs(free_space_transport(p.length, kCarrier)));
    }
}

TEST_CASE("knife-edge oracle over a thin wall", "[tracer][rooftop]")
{
    const Scene scene({slab(1, 49.995, -100, 50.005, 100, 15)}, {});
    const TraceLimits limits{0, 0, true, 250.0};
    const auto paths = trace_specular(scene, {0, 0, 10}, {100, 0, 10}, kCarrier, limits);
    REQUIRE(paths.size() == 1);
    const RayPath &p = paths.front();
    CHECK(p.interactions.front().kind == InteractionKind::RooftopDiffraction);
    CHECK(excess_db(p, 100.0) == Approx(knife_edge_db(5.0, 50.0, 50.0)).margin(0.1));
}

TEST_CASE("flat roof acts as one equivalent edge", "[tracer][rooftop]")
{
    const Scene scene({slab(1, 40, -100, 60, 100, 15)}, {});
    const TraceLimits limits{0, 0, true, 250.0};
    const auto paths = trace_specular(scene, {0, 0, 10}, {100, 0, 10}, kCarrier, limits);
    REQUIRE(paths.size() == 1);
    // Ray slopes 5/40 from each antenna meet above the roof centre at 10 + 50 * 0.125 = 16.25 m.
    CHECK(paths.front().interactions.size() == 2);
    CHECK(excess_db(paths.front(), 100.0) == Approx(knife_edge_db(6.25, 50.0, 50.0)).margin(0.1));
}

TEST_CASE("two separated screens follow Epstein-Peterson", "[tracer][rooftop]")
{
    const Scene scene({slab(1, 29.995, -100, 30.005, 100, 14), slab(2, 69.995, -100, 70.005, 100, 14)}, {});
    const TraceLimits limits{0, 0, true, 250.0};
    const auto paths = trace_specular(scene, {0, 0, 10}, {100, 0, 10}, kCarrier, limits);
    REQUIRE(paths.size() == 1);
    // Edge 1 above the chord tx -> edge 2: 14 - (10 + 4 * 30 / 70); edge 2 symmetric.
    const double h = 14.0 - (10.0 + 4.0 * 30.0 / 70.0);
    const double expected = knife_edge_db(h, 30.0, 40.0) + knife_edge_db(h, 40.0, 30.0);
    CHECK(excess_db(paths.front(), 100.0) == Approx(expected).margin(0.15));
}

TEST_CASE("total field is continuous across an edge shadow boundary", "[tracer][utd]")
{
    const Scene scene({slab(1, 0, 0, 10, 10, 50)}, {});
    const TraceLimits limits{0, 1, false, 250.0};
    const Vec3 tx{-20, -5, 2};
    const SpecularTracer tracer(scene, tx, kCarrier, limits);
    // The boundary from tx through the corner (10, 0) passes (40, 5).
    for (double delta : {1e-3, 1e-5})
    {
        const auto lit = tracer.trace({40, 5 - delta, 2});
        const auto shadow = tracer.trace({40, 5 + delta, 2});
        const auto has_los = [](const std::vector<RayPath> &ps) {
            return std::any_of(ps.begin(), ps.end(), [](const RayPath &p) { return p.interactions.empty(); });
        };
        CHECK(has_los(lit));
        CHECK_FALSE(has_los(shadow));
        for (PolPair pol : {kVV, kHH})
        {
            cdouble a = 0.0, b = 0.0;
            for (const auto &p : lit)
                a += p.transfer(pol);
            for (const auto &p : shadow)
                b += p.transfer(pol);
            INFO("delta = " << delta);
            CHECK(std::abs(db20(std::abs(a) / std::abs(b))) < 0.1);
            CHECK(std::abs(std::arg(a / b)) < 0.02);
        }
    }
}

TEST_CASE("traces are reciprocal", "[tracer][property]")
{
    const Scene scene = preset_scene();
    const Vec3 bs{750, 20, 20.5};
    for (const Vec3 ue : {Vec3{600, 0, 4.5}, Vec3{700, 0, 4.5}, Vec3{1000, 0, 4.5}, Vec3{300, 0, 4.5}})
    {
        const auto forward = trace_specular(scene, bs, ue, kCarrier);
        const auto backward = trace_specular(scene, ue, bs, kCarrier);
        INFO("ue x = " << ue.x);
        REQUIRE(forward.size() == backward.size());
        std::map<Signature, const RayPath *> back;
        for (const auto &p : backward)
            back[reversed(p.signature())] = &p;
        for (const auto &p : forward)
        {
            const auto it = back.find(p.signature());
            REQUIRE(it != back.end());
            const RayPath &q = *it->second;
            CHECK(q.delay == Approx(p.delay).epsilon(1e-12));
            const PolMatrix t = q.transfer.transposed();
            const double scale = p.transfer.max_abs();
            for (PolPair pol : {kVV, kVH, kHV, kHH})
                CHECK(std::abs(t(pol) - p.transfer(pol)) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("path set is deterministic and ordered", "[tracer]")
{
    const Scene scene = preset_scene();
    const SpecularTracer tracer(scene, {750, 20, 20.5}, kCarrier);
    const auto a = tracer.trace({820, 0, 4.5});
    const auto b = tracer.trace({820, 0, 4.5});
    REQUIRE(a.size() == b.size());
    REQUIRE_FALSE(a.empty());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].signature() == b[i].signature());
        CHECK(a[i].delay == b[i].delay);
    }
    // Signatures are unique within one position.
    std::vector<Signature> sigs;
    for (const auto &p : a)
        sigs.push_back(p.signature());
    std::sort(sigs.begin(), sigs.end());
    CHECK(std::adjacent_find(sigs.begin(), sigs.end()) == sigs.end());
    // Every segment of every path is unobstructed.
    for (const auto &p : a)
        for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
            if (p.interactions.empty() || p.interactions.front().kind != InteractionKind::RooftopDiffraction)
                CHECK(scene.is_los(p.vertices[i], p.vertices[i + 1]));
}

TEST_CASE("limits restrict the interaction mix", "[tracer]")
{
    const Scene scene = preset_scene();
    const Vec3 bs{750, 20, 20.5}, ue{640, 0, 4.5};
    const auto count_kind = [](const std::vector<RayPath> &ps, InteractionKind k) {
        std::size_t n = 0;
        for (const auto &p : ps)
            for (const auto &r : p.interactions)
                n += r.kind == k;
        return n;
    };
    const auto full = trace_specular(scene, bs, ue, kCarrier);
    CHECK(count_kind(full, InteractionKind::VerticalEdgeDiffraction) > 0);
    for (const auto &p : full)
    {
        std::size_t refl = 0, diff = 0, roof = 0;
        for (const auto &r : p.interactions)
        {
            refl += r.kind == InteractionKind::Reflection;
            diff += r.kind == InteractionKind::VerticalEdgeDiffraction;
            roof += r.kind == InteractionKind::RooftopDiffraction;
        }
        CHECK(diff <= 1);
        CHECK(refl + diff <= 2);
        CHECK((roof == 0 || refl + diff == 0));
    }
    const auto no_diff = trace_specular(scene, bs, ue, kCarrier, TraceLimits{2, 0, false, 250.0});
    CHECK(count_kind(no_diff, InteractionKind::VerticalEdgeDiffraction) == 0);
    CHECK(count_kind(no_diff, InteractionKind::RooftopDiffraction) == 0);
    const auto los_only = trace_specular(scene, bs, ue, kCarrier, TraceLimits{0, 0, false, 250.0});
    CHECK(los_only.size() <= 1);

    const auto floor = trace_specular(scene, bs, ue, kCarrier, TraceLimits{2, 1, true, 110.0});
    CHECK(floor.size() < full.size());
    for (const auto &p : floor)
        CHECK(-db20(p.transfer.max_abs()) <= 110.0);
}

TEST_CASE("invalid queries are rejected", "[tracer]")
{
    const Scene scene({slab(1, 0, 0, 10, 10, 10)}, {});
    CHECK_THROWS_AS(trace_specular(scene, {-5, 5, 2}, {-5, 5, 2}, kCarrier), std::domain_error);
    CHECK_THROWS_AS(trace_specular(scene, {5, 5, 2}, {-5, 5, 2}, kCarrier), std::domain_error);
    CHECK_THROWS_AS(trace_specular(scene, {-5, 5, 2}, {NAN, 5, 2}, kCarrier), std::domain_error);
    CHECK_THROWS_AS(SpecularTracer(scene, {-5, 5, 2}, kCarrier, TraceLimits{3, 1, true, 250.0}), std::invalid_argument);
    CHECK_THROWS_AS(SpecularTracer(scene, {-5, 5, 2}, kCarrier, TraceLimits{2, 2, true, 250.0}), std::invalid_argument);
}
