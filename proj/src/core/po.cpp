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

#include "railchan/po.hpp"
#include "railchan/tracer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace railchan
{

namespace
{

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

std::size_t cells_for(double size, double facet)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(size / facet - 1e-9)));
}

bool inside_bounds(const FacetMesh &mesh, const Vec3 &p)
{
    if (mesh.radius <= 0.0)
        return false;
    return norm(p.xy() - mesh.axis_base.xy()) < mesh.radius && p.z >= mesh.axis_base.z && p.z <= mesh.axis_base.z + mesh.height;
}

// Field vectors (V and H port of the leg's antenna) arriving at a point seen along `dir` from the
// leg's apparent source.
std::array<CVec3, 2> leg_field(const ScatterLeg &leg, const Vec3 &dir, const CarrierConfig &carrier)
{
    if (!leg.mirror)
    {
        const PolBasis b = polarization_basis(dir);
        return {CVec3(b.v), CVec3(b.h)};
    }
    const Vec3 &n = leg.mirror->normal;
    const Vec3 before = dir - n * (2.0 * dot(dir, n));
    const PolBasis b = polarization_basis(before);
    const double incidence = std::acos(std::clamp(std::abs(dot(before, n)), 0.0, 1.0));
    const ReflectionCoefficients r = fresnel_reflection(leg.mirror->material, incidence, carrier);
    return {apply_reflection(CVec3(b.v), before, dir, n, r), apply_reflection(CVec3(b.h), before, dir, n, r)};
}

} // namespace

FacetMesh mesh_cylinder(const CylinderScatterer &cyl, const CarrierConfig &carrier, double facet_size)
{
    if (!(cyl.radius > 0.0) || !(cyl.height > 0.0))
        throw std::invalid_argument("mesh_cylinder: radius and height must be positive");
    const double fs = facet_size > 0.0 ? facet_size : carrier.wavelength() / 2.0;
    const std::size_t n_phi = cells_for(2.0 * kPi * cyl.radius, fs);
    const std::size_t n_z = cells_for(cyl.height, fs);
    const double a = 2.0 * kPi * cyl.radius / static_cast<double>(n_phi);
    const double b = cyl.height / static_cast<double>(n_z);

    FacetMesh mesh;
    mesh.scatterer_id = cyl.id;
    mesh.center = cyl.base_center + Vec3{0.0, 0.0, cyl.height / 2.0};
    mesh.axis_base = cyl.base_center;
    mesh.radius = cyl.radius;
    mesh.height = cyl.height;
    mesh.facets.reserve(n_phi * n_z);
    for (std::size_t i = 0; i < n_phi; ++i)
    {
        const double phi = (static_cast<double>(i) + 0.5) * 2.0 * kPi / static_cast<double>(n_phi);
        const Vec3 normal{std::cos(phi), std::sin(phi), 0.0};
        const Vec3 tangent{-std::sin(phi), std::cos(phi), 0.0};
        for (std::size_t j = 0; j < n_z; ++j)
        {
            Facet f;
            f.center = cyl.base_center + normal * cyl.radius + Vec3{0.0, 0.0, (static_cast<double>(j) + 0.5) * b};
            f.normal = normal;
            f.a_hat = tangent;
            f.b_hat = {0.0, 0.0, 1.0};
            f.a = a;
            f.b = b;
            f.area = a * b;
            mesh.facets.push_back(f);
        }
    }
    return mesh;
}

FacetMesh mesh_plate(const Vec3 &center, const Vec3 &normal, const Vec3 &a_dir, double size_a, double size_b, double facet_size)
{
    if (!(size_a > 0.0) || !(size_b > 0.0) || !(facet_size > 0.0))
        throw std::invalid_argument("mesh_plate: sizes must be positive");
    const Vec3 n = normalized(normal);
    const Vec3 a_hat = normalized(a_dir - n * dot(a_dir, n));
    const Vec3 b_hat = cross(n, a_hat);
    const std::size_t na = cells_for(size_a, facet_size), nb = cells_for(size_b, facet_size);
    const double a = size_a / static_cast<double>(na), b = size_b / static_cast<double>(nb);

    FacetMesh mesh;
    mesh.center = center;
    mesh.facets.reserve(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
        {
            Facet f;
            f.center = center + a_hat * ((static_cast<double>(i) + 0.5) * a - size_a / 2.0) +
                       b_hat * ((static_cast<double>(j) + 0.5) * b - size_b / 2.0);
            f.normal = n;
            f.a_hat = a_hat;
            f.b_hat = b_hat;
            f.a = a;
            f.b = b;
            f.area = a * b;
            mesh.facets.push_back(f);
        }
    return mesh;
}

ScatterContribution po_scattered_matrix(const FacetMesh &mesh, const ScatterLeg &incident, const ScatterLeg &scattered,
                                        const CarrierConfig &carrier, const AntennaConfig &tx_antenna,
                                        const AntennaConfig &rx_antenna)
{
    for (const Vec3 *p : {&incident.source, &scattered.source})
        if (inside_bounds(mesh, *p))
            throw std::domain_error("po_scattered_matrix: source or observer inside the scatterer");
    if (!incident.polyline.empty() && inside_bounds(mesh, incident.polyline.front()))
        throw std::domain_error("po_scattered_matrix: transmitter inside the scatterer");
    if (!scattered.polyline.empty() && inside_bounds(mesh, scattered.polyline.front()))
        throw std::domain_error("po_scattered_matrix: receiver inside the scatterer");

    const double lambda = carrier.wavelength();
    const double k = carrier.wavenumber();
    const cdouble prefactor = (lambda / (4.0 * kPi)) * cdouble{0.0, -k / (2.0 * kPi)} * (tx_antenna.amplitude() * rx_antenna.amplitude());

    ScatterContribution out;
    for (const Facet &f : mesh.facets)
    {
        const Vec3 vi = f.center - incident.source;
        const double ri = norm(vi);
        const Vec3 vs = scattered.source - f.center;
        const double rs = norm(vs);
        if (ri < kEpsGeom || rs < kEpsGeom)
            throw std::domain_error("po_scattered_matrix: source or observer on a facet");
        const Vec3 ki = vi / ri, ks = vs / rs;
        if (dot(ki, f.normal) >= 0.0 || dot(ks, f.normal) <= 0.0)
            continue;
        ++out.active_facets;

        const Vec3 q = ks - ki;
        const double x = 0.5 * k * f.a * dot(q, f.a_hat);
        const double y = 0.5 * k * f.b * dot(q, f.b_hat);
        const cdouble c = prefactor * f.area * sinc(x) * sinc(y) * std::polar(1.0 / (ri * rs), -k * (ri + rs));

        const auto et = leg_field(incident, ki, carrier);
        const auto er = leg_field(scattered, -ks, carrier);
        for (int p = 0; p < 2; ++p)
            for (int t = 0; t < 2; ++t)
            {
                const cdouble fwd = dot(er[p], cross(f.normal, cross(ki, et[t])));
                const cdouble bwd = dot(et[t], cross(f.normal, cross(-ks, er[p])));
                out.transfer.m[p][t] += c * 0.5 * (fwd + bwd);
            }
    }
    out.delay = (incident.length() + scattered.length()) / kSpeedOfLight;
    return out;
}

double bistatic_rcs(const FacetMesh &mesh, const Vec3 &source, const Vec3 &observer, const CarrierConfig &carrier, PolPair pol)
{
    ScatterLeg in, sc;
    in.source = source;
    in.polyline = {source, mesh.center};
    sc.source = observer;
    sc.polyline = {observer, mesh.center};
    const PolMatrix t = po_scattered_matrix(mesh, in, sc, carrier).transfer;
    const double ri = distance(source, mesh.center), rs = distance(observer, mesh.center);
    const double four_pi = 4.0 * kPi;
    const double lambda = carrier.wavelength();
    return four_pi * four_pi * four_pi * (ri * rs) * (ri * rs) * std::norm(t(pol)) / (lambda * lambda);
}

std::size_t count_active_facets(const FacetMesh &mesh, const Vec3 &source, const Vec3 &observer)
{
    std::size_t n = 0;
    for (const Facet &f : mesh.facets)
        if (dot(f.center - source, f.normal) < 0.0 && dot(observer - f.center, f.normal) > 0.0)
            ++n;
    return n;
}

Vec3 scatter_reference_point(const CylinderScatterer &cyl, const Vec3 &source, const Vec3 &observer)
{
    const Vec2 axis = cyl.base_center.xy();
    const Vec2 u1 = source.xy() - axis, u2 = observer.xy() - axis;
    const double d1 = norm(u1), d2 = norm(u2);
    if (d1 <= cyl.radius || d2 <= cyl.radius)
        throw std::domain_error("scatter_reference_point: antenna inside the scatterer footprint");
    Vec2 bis = u1 / d1 + u2 / d2;
    if (norm(bis) < 1e-9)
        bis = Vec2{-u1.y, u1.x};
    bis = bis / norm(bis);
    const double z = std::clamp(source.z + (observer.z - source.z) * d1 / (d1 + d2), cyl.base_center.z, cyl.base_center.z + cyl.height);
    const Vec2 p = axis + bis * cyl.radius;
    return {p.x, p.y, z};
}

ScatterEngine::ScatterEngine(const Scene &scene, const CarrierConfig &carrier, ScatterPolicy policy, double facet_size,
                             const AntennaConfig &tx_antenna, const AntennaConfig &rx_antenna)
    : scene_(scene), carrier_(carrier), policy_(policy), tx_antenna_(tx_antenna), rx_antenna_(rx_antenna)
{
    if (policy != ScatterPolicy::Off)
        for (const auto &s : scene.scatterers())
            meshes_.push_back(mesh_cylinder(s, carrier, facet_size));
}

std::vector<std::optional<std::size_t>> ScatterEngine::candidate_mirrors(std::size_t scatterer, const Vec3 &antenna) const
{
    std::vector<std::optional<std::size_t>> out{std::nullopt};
    if (policy_ != ScatterPolicy::DirectAndReflection)
        return out;
    const CylinderScatterer &cyl = scene_.scatterers()[scatterer];
    const Vec2 axis = cyl.base_center.xy();
    const auto &facades = scene_.facades();
    for (std::size_t f = 0; f < facades.size(); ++f)
    {
        const Facade &fc = facades[f];
        if (fc.signed_distance(antenna.xy()) <= kEpsGeom || fc.signed_distance(axis) <= cyl.radius + kEpsGeom)
            continue;
        const Vec3 image = fc.mirror(antenna);
        const auto tu = intersect_lines_2d(image.xy(), axis, fc.start, fc.end);
        if (!tu || tu->first <= 0.0 || tu->first >= 1.0)
            continue;
        const double margin = cyl.radius / fc.length;
        if (tu->second < -margin || tu->second > 1.0 + margin)
            continue;
        out.emplace_back(f);
    }
    return out;
}

std::optional<ScatterLeg> ScatterEngine::make_leg(const Vec3 &antenna, std::optional<std::size_t> facade, const Vec3 &reference) const
{
    ScatterLeg leg;
    if (!facade)
    {
        leg.source = antenna;
        leg.polyline = {antenna, reference};
    }
    else
    {
        const Facade &fc = scene_.facades()[*facade];
        if (fc.signed_distance(reference.xy()) <= kEpsGeom)
            return std::nullopt;
        leg.source = fc.mirror(antenna);
        const auto p = facade_crossing(fc, leg.source, reference);
        if (!p)
            return std::nullopt;
        leg.polyline = {antenna, *p, reference};
        const ElementRef ref = scene_.facade_ref(*facade);
        leg.interactions.push_back({InteractionKind::Reflection, ref, *p});
        leg.mirror = LegMirror{fc.start, fc.normal3(), scene_.buildings()[fc.building].material, ref};
    }
    for (std::size_t i = 0; i + 1 < leg.polyline.size(); ++i)
        if (distance(leg.polyline[i], leg.polyline[i + 1]) <= kEpsGeom || !scene_.is_los(leg.polyline[i], leg.polyline[i + 1]))
            return std::nullopt;
    return leg;
}

std::vector<RayPath> ScatterEngine::paths(const Vec3 &tx, const Vec3 &rx) const
{
    std::vector<RayPath> out;
    if (policy_ == ScatterPolicy::Off)
        return out;
    const auto &scatterers = scene_.scatterers();
    for (std::size_t s = 0; s < scatterers.size(); ++s)
    {
        const CylinderScatterer &cyl = scatterers[s];
        const FacetMesh &mesh = meshes_[s];
        if (inside_bounds(mesh, tx) || inside_bounds(mesh, rx))
            throw std::domain_error("scatter paths: antenna inside a scatterer");
        const auto tx_mirrors = candidate_mirrors(s, tx);
        const auto rx_mirrors = candidate_mirrors(s, rx);
        for (const auto &mt : tx_mirrors)
            for (const auto &mr : rx_mirrors)
            {
                const Vec3 source = mt ? scene_.facades()[*mt].mirror(tx) : tx;
                const Vec3 observer = mr ? scene_.facades()[*mr].mirror(rx) : rx;
                const Vec3 ref = scatter_reference_point(cyl, source, observer);
                const auto in = make_leg(tx, mt, ref);
                if (!in)
                    continue;
                const auto sc = make_leg(rx, mr, ref);
                if (!sc)
                    continue;
                const ScatterContribution c = po_scattered_matrix(mesh, *in, *sc, carrier_, tx_antenna_, rx_antenna_);
                if (c.active_facets == 0)
                    continue;

                RayPath path;
                path.tag = PathTag::Scatter;
                path.vertices.assign(in->polyline.begin(), in->polyline.end());
                path.interactions = in->interactions;
                path.interactions.push_back({InteractionKind::Scattering, ElementRef{ObjectClass::Scatterer, cyl.id, 0}, ref});
                for (auto it = sc->polyline.rbegin() + 1; it != sc->polyline.rend(); ++it)
                    path.vertices.push_back(*it);
                for (auto it = sc->interactions.rbegin(); it != sc->interactions.rend(); ++it)
                    path.interactions.push_back(*it);
                update_path_geometry(path);
                path.transfer = c.transfer;
                out.push_back(std::move(path));
            }
    }
    return out;
}

std::vector<RayPath> enumerate_scatter_paths(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const CarrierConfig &carrier,
                                             ScatterPolicy policy, const AntennaConfig &tx_antenna, const AntennaConfig &rx_antenna)
{
    return ScatterEngine(scene, carrier, policy, 0.0, tx_antenna, rx_antenna).paths(tx, rx);
}

} // namespace railchan
