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

#include "railchan/em.hpp"
#include "railchan/tracer.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace railchan;
using Catch::Approx;

TEST_CASE("polarization basis is orthonormal and right-handed", "[em]")
{
    for (const Vec3 d : {Vec3{1, 0, 0}, Vec3{0.3, -0.8, 0.2}, Vec3{-1, 2, -3}, Vec3{0, 0, 1}})
    {
        const Vec3 u = normalized(d);
        const PolBasis b = polarization_basis(u);
        CHECK(norm(b.v) == Approx(1.0));
        CHECK(norm(b.h) == Approx(1.0));
        CHECK(dot(b.v, b.h) == Approx(0.0).margin(1e-15));
        CHECK(dot(b.v, u) == Approx(0.0).margin(1e-15));
        const Vec3 r = cross(b.v, b.h);
        CHECK(dot(r, u) == Approx(1.0));
    }
    const PolBasis horizontal = polarization_basis({1, 0, 0});
    CHECK(horizontal.v.z == Approx(-1.0));
    CHECK(horizontal.h.y == Approx(1.0));
}

TEST_CASE("free-space transport", "[em]")
{
    const CarrierConfig carrier{1.9e9};
    const cdouble t = free_space_transport(100.0, carrier);
    CHECK(-20.0 * std::log10(std::abs(t)) == Approx(78.0).margin(0.05));
    CHECK(std::arg(t * std::polar(1.0, carrier.wavenumber() * 100.0)) == Approx(0.0).margin(1e-9));
    CHECK_THROWS_AS(free_space_transport(0.0, carrier), std::domain_error);
}

TEST_CASE("single line-of-sight path power", "[em]")
{
    const Scene empty({}, {});
    const CarrierConfig carrier{1.9e9};
    const auto paths = trace_specular(empty, {0, 0, 10}, {100, 0, 10}, carrier);
    REQUIRE(paths.size() == 1);
    const RayPath &p = paths.front();
    CHECK(p.interactions.empty());
    CHECK(p.length == Approx(100.0));
    CHECK(p.delay == Approx(100.0 / kSpeedOfLight));
    const double power_vv = 43.0 + 20.0 * std::log10(std::abs(p.transfer(kVV)));
    CHECK(power_vv == Approx(-35.0).margin(0.05));
    CHECK(std::abs(p.transfer(kHH)) == Approx(std::abs(p.transfer(kVV))));
    CHECK(std::abs(p.transfer(kVH)) < 1e-15);
    CHECK(std::abs(p.transfer(kHV)) < 1e-15);

    const auto gained = trace_specular(empty, {0, 0, 10}, {100, 0, 10}, carrier, {}, AntennaConfig{3.0}, AntennaConfig{2.0});
    const double power_gained = 43.0 + 20.0 * std::log10(std::abs(gained.front().transfer(kVV)));
    CHECK(power_gained - power_vv == Approx(5.0).margin(1e-9));
}

TEST_CASE("Fresnel reflection coefficients", "[em]")
{
    const CarrierConfig carrier{1.9e9};
    const auto pec = fresnel_reflection(Material::pec(), 0.3, carrier);
    CHECK(pec.te == cdouble{-1.0, 0.0});
    CHECK(pec.tm == cdouble{1.0, 0.0});

    const Material glass{4.0, 0.0, false};
    const auto normal = fresnel_reflection(glass, 0.0, carrier);
    CHECK(normal.te.real() == Approx(-1.0 / 3.0));
    CHECK(normal.tm.real() == Approx(1.0 / 3.0));

    const double brewster = std::atan(2.0);
    CHECK(std::abs(fresnel_reflection(glass, brewster, carrier).tm) < 1e-12);

    const auto grazing = fresnel_reflection(glass, kPi / 2.0, carrier);
    CHECK(grazing.te.real() == Approx(-1.0));
    CHECK(grazing.tm.real() == Approx(-1.0));

    // Lossy material: |coefficients| < 1.
    const Material concrete{5.0, 0.1, false};
    for (double th = 0.0; th < kPi / 2.0; th += 0.1)
    {
        const auto r = fresnel_reflection(concrete, th, carrier);
        CHECK(std::abs(r.te) < 1.0);
        CHECK(std::abs(r.tm) < 1.0);
    }
}

TEST_CASE("reflection dyad preserves transversality", "[em]")
{
    const Vec3 s_in = normalized(Vec3{1.0, 1.0, -0.2});
    const Vec3 n{0.0, -1.0, 0.0};
    const Vec3 s_out = s_in - n * (2.0 * dot(s_in, n));
    const PolBasis b = polarization_basis(s_in);
    const ReflectionCoefficients pec{-1.0, 1.0};
    for (const Vec3 &e : {b.v, b.h})
    {
        const CVec3 out = apply_reflection(CVec3(e), s_in, s_out, n, pec);
        CHECK(std::abs(dot(out, s_out)) < 1e-14);
        CHECK(std::sqrt(std::norm(out.x) + std::norm(out.y) + std::norm(out.z)) == Approx(1.0));
        // Tangential field vanishes on a perfect conductor: (E_in + E_out) x n = 0.
        const CVec3 total = CVec3(e) + out;
        const CVec3 t = cross(n, total);
        CHECK(std::abs(t.x) + std::abs(t.y) + std::abs(t.z) < 1e-14);
    }
}

TEST_CASE("wedge angle", "[em]")
{
    const Scene scene = load_scene(R"({"version": 1, "buildings": [
        {"id": 1, "footprint": [[0, 0], [10, 0], [10, 10], [0, 10]], "height": 10}]})");
    // Vertex 0 at (0,0): face 0 leaves along +x, the exterior spans 270 degrees.
    const VerticalEdge &e = scene.edges()[0];
    CHECK(e.position == Vec2{0.0, 0.0});
    CHECK(wedge_angle(scene, e, {1.0, 0.0}) == Approx(0.0).margin(1e-12));
    CHECK(wedge_angle(scene, e, {0.0, -1.0}) == Approx(kPi / 2.0));
    CHECK(wedge_angle(scene, e, {-1.0, 0.0}) == Approx(kPi));
    CHECK(wedge_angle(scene, e, {0.0, 1.0}) == Approx(1.5 * kPi));
}
