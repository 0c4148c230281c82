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

#include "railchan/special_functions.hpp"

#include <stdexcept>

namespace railchan
{

PolBasis polarization_basis(const Vec3 &direction)
{
    const Vec3 d = normalized(direction);
    const double rho = std::hypot(d.x, d.y);
    const double cp = rho > 0.0 ? d.x / rho : 1.0, sp = rho > 0.0 ? d.y / rho : 0.0;
    const double ct = std::clamp(d.z, -1.0, 1.0), st = rho;
    return {{ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

cdouble free_space_transport(double d, const CarrierConfig &carrier)
{
    if (!(d > 0.0))
        throw std::domain_error("free_space_transport: distance must be positive");
    const double lambda = carrier.wavelength();
    return lambda / (4.0 * kPi * d) * std::polar(1.0, -2.0 * kPi * d / lambda);
}

ReflectionCoefficients fresnel_reflection(const Material &material, double incidence_angle, const CarrierConfig &carrier)
{
    if (material.is_pec)
        return {-1.0, 1.0};
    const double theta = std::clamp(incidence_angle, 0.0, kPi / 2.0);
    const cdouble eps{material.relative_permittivity,
                      -material.conductivity / (2.0 * kPi * carrier.frequency * kEpsilon0)};
    const double c = std::cos(theta), s = std::sin(theta);
    const cdouble root = std::sqrt(eps - s * s);
    return {(c - root) / (c + root), (eps * c - root) / (eps * c + root)};
}

double knife_edge_v(double h, double d1, double d2, double wavelength)
{
    return h * std::sqrt(2.0 * (d1 + d2) / (wavelength * d1 * d2));
}

cdouble knife_edge_diffraction(double v) { return cdouble{0.5, 0.5} * fresnel_tail(v); }

double knife_edge_loss_db(double v) { return -20.0 * std::log10(std::abs(knife_edge_diffraction(v))); }

namespace
{

// cot((pi + sign*beta)/(2n)) * F(k L a^sign(beta)), with the small-epsilon expansion near
// shadow and reflection boundaries where the cotangent is singular.
cdouble utd_term(double beta, int sign, double n, double kl)
{
    const double N = std::round((beta + sign * kPi) / (2.0 * kPi * n));
    const double eps = kPi + sign * beta - sign * 2.0 * kPi * n * N;
    const cdouble e_j_pi4 = std::polar(1.0, kPi / 4.0);
    if (std::abs(eps) < 1e-7)
    {
        const double sgn = (eps > 0.0) - (eps < 0.0);
        return n * (std::sqrt(2.0 * kPi * kl) * sgn - 2.0 * kl * eps * e_j_pi4) * e_j_pi4;
    }
    const double c = std::cos((2.0 * kPi * n * N - beta) / 2.0);
    const double a = 2.0 * c * c;
    const double cot = 1.0 / std::tan((kPi + sign * beta) / (2.0 * n));
    return cot * utd_transition(kl * a);
}

} // namespace

DiffractionCoefficients utd_vertical_edge(const WedgeGeometry &w, const CarrierConfig &carrier, const Material &face_0,
                                          const Material &face_n)
{
    if (!(w.s_incident > kEpsGeom) || !(w.s_diffracted > kEpsGeom))
        throw std::domain_error("utd_vertical_edge: source or observer on the edge");
    const double k = carrier.wavenumber();
    const double sin_b0 = std::sin(w.beta0);
    if (!(sin_b0 > 1e-12))
        throw std::domain_error("utd_vertical_edge: ray parallel to the edge");
    const double L = w.s_incident * w.s_diffracted * sin_b0 * sin_b0 / (w.s_incident + w.s_diffracted);
    const double kl = k * L;
    const double bm = w.phi_diffracted - w.phi_incident;
    const double bp = w.phi_diffracted + w.phi_incident;

    const cdouble t1 = utd_term(bm, +1, w.n, kl);
    const cdouble t2 = utd_term(bm, -1, w.n, kl);
    const cdouble t3 = utd_term(bp, +1, w.n, kl); // n-face reflection boundary
    const cdouble t4 = utd_term(bp, -1, w.n, kl); // 0-face reflection boundary

    const double grazing = (kPi - std::abs(bm)) / 2.0;
    const double incidence = std::acos(std::min(1.0, std::abs(std::sin(grazing))));
    const ReflectionCoefficients r0 = fresnel_reflection(face_0, incidence, carrier);
    const ReflectionCoefficients rn = fresnel_reflection(face_n, incidence, carrier);

    const cdouble pre = -std::polar(1.0, -kPi / 4.0) / (2.0 * w.n * std::sqrt(2.0 * kPi * k) * sin_b0);
    return {pre * (t1 + t2 + rn.te * t3 + r0.te * t4), pre * (t1 + t2 + rn.tm * t3 + r0.tm * t4)};
}

double wedge_angle(const Scene &scene, const VerticalEdge &edge, const Vec2 &direction)
{
    const Vec2 u0 = scene.facades()[edge.face_0].direction;
    double a = std::atan2(cross(direction, u0), dot(direction, u0));
    if (a < 0.0)
        a += 2.0 * kPi;
    return a;
}

CVec3 apply_reflection(const CVec3 &e, const Vec3 &s_in, const Vec3 &s_out, const Vec3 &normal, const ReflectionCoefficients &r)
{
    Vec3 perp = cross(s_in, normal);
    const double pn = norm(perp);
    if (pn < 1e-12)
    {
        // Normal incidence: any tangent direction works, pick one orthogonal to the normal.
        perp = std::abs(normal.z) < 0.9 ? cross(normal, Vec3{0, 0, 1}) : cross(normal, Vec3{1, 0, 0});
        perp = normalized(perp);
    }
    else
        perp = perp / pn;
    const Vec3 par_in = cross(perp, s_in);
    const Vec3 par_out = cross(perp, s_out);
    return scaled(perp, r.te * dot(e, perp)) + scaled(par_out, r.tm * dot(e, par_in));
}

namespace
{

CVec3 apply_edge_diffraction(const CVec3 &e, const Vec3 &s_in, const Vec3 &s_out, const DiffractionCoefficients &d)
{
    const Vec3 edge{0.0, 0.0, 1.0};
    const Vec3 phi_in = normalized(cross(edge, s_in)) * -1.0;
    const Vec3 beta_in = cross(s_in, phi_in);
    const Vec3 phi_out = normalized(cross(edge, s_out));
    const Vec3 beta_out = cross(s_out, phi_out);
    return scaled(beta_out, -d.soft * dot(e, beta_in)) + scaled(phi_out, -d.hard * dot(e, phi_in));
}

CVec3 apply_bend(const CVec3 &e, const Vec3 &s_in, const Vec3 &s_out, cdouble coefficient)
{
    Vec3 a = cross(s_in, s_out);
    if (norm(a) < 1e-12)
        a = cross(Vec3{0, 0, 1}, s_in);
    a = normalized(a);
    const Vec3 b_in = cross(a, s_in), b_out = cross(a, s_out);
    return scaled(a, coefficient * dot(e, a)) + scaled(b_out, coefficient * dot(e, b_in));
}

} // namespace

namespace
{

// Knife-edge factor of a roof whose first and last edges are a and b (equal for a single edge),
// between the neighbouring path vertices prev and next. The excess-path phase is removed
// because the composed path already carries exp(-jkL) over the bent path.
cdouble roof_factor(const Vec3 &prev, const Vec3 &a, const Vec3 &b, const Vec3 &next, double k, double lambda)
{
    Vec3 edge = a;
    double excess = distance(prev, a) + distance(a, b) + distance(b, next) - distance(prev, next);
    if (!(a == b))
    {
        // Profile coordinates in the vertical plane of the path.
        const Vec2 axis = (next.xy() - prev.xy()) / norm(next.xy() - prev.xy());
        const auto s_of = [&](const Vec3 &p) { return dot(p.xy() - prev.xy(), axis); };
        const double sa = s_of(a), sb = s_of(b), s1 = s_of(next);
        const double m1 = (a.z - prev.z) / sa;
        const double m2 = (b.z - next.z) / (sb - s1);
        if (m1 > m2 && sa > 0.0 && sb < s1)
        {
            const double s = (next.z - prev.z - m2 * s1) / (m1 - m2);
            const Vec2 xy = prev.xy() + axis * s;
            edge = {xy.x, xy.y, prev.z + m1 * s};
        }
    }
    const Vec3 chord = next - prev;
    const double chord_len = norm(chord);
    const double t = dot(edge - prev, chord) / (chord_len * chord_len);
    const double z_line = prev.z + t * chord.z;
    const double h = norm(cross(chord, edge - prev)) / chord_len * (edge.z >= z_line ? 1.0 : -1.0);
    const double v = knife_edge_v(h, distance(prev, edge), distance(edge, next), lambda);
    return knife_edge_diffraction(v) * std::polar(1.0, k * excess);
}

} // namespace

PolMatrix compose_path_matrix(const Scene &scene, std::span<const Vec3> vertices, std::span<const InteractionRecord> interactions,
                              const CarrierConfig &carrier, const AntennaConfig &tx_antenna, const AntennaConfig &rx_antenna)
{
    if (vertices.size() != interactions.size() + 2)
        throw std::invalid_argument("compose_path_matrix: vertex/interaction count mismatch");
    std::vector<double> seg(vertices.size() - 1);
    std::vector<Vec3> dir(vertices.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
    {
        seg[i] = distance(vertices[i], vertices[i + 1]);
        if (!(seg[i] > kEpsGeom))
            throw std::domain_error("compose_path_matrix: zero-length segment");
        dir[i] = (vertices[i + 1] - vertices[i]) / seg[i];
        total += seg[i];
    }

    const double lambda = carrier.wavelength();
    const double k = carrier.wavenumber();

    // Scalar spreading: spherical over the unfolded length, or the UTD edge spreading when the
    // path contains a vertical-edge diffraction.
    double spreading = lambda / (4.0 * kPi * total);
    cdouble scalar = 1.0;

    const PolBasis tx_basis = polarization_basis(dir.front());
    const PolBasis rx_basis = polarization_basis(-dir.back());
    std::array<CVec3, 2> field{CVec3(tx_basis.v), CVec3(tx_basis.h)};

    double travelled = 0.0;
    for (std::size_t i = 0; i < interactions.size(); ++i)
    {
        travelled += seg[i];
        const InteractionRecord &rec = interactions[i];
        const Vec3 &s_in = dir[i], &s_out = dir[i + 1];
        if (rec.element.object_class != ObjectClass::Building)
            throw std::invalid_argument("compose_path_matrix: only building interactions are supported");
        const std::size_t bi = scene.building_index(rec.element.object_id);
        const Building &b = scene.buildings()[bi];
        const int nv = static_cast<int>(b.footprint.size());

        switch (rec.kind)
        {
        case InteractionKind::Reflection: {
            const Facade &f = scene.facades()[scene.facade_index(bi, rec.element.element_id)];
            const Vec3 n = f.normal3();
            const double incidence = std::acos(std::clamp(-dot(s_in, n), 0.0, 1.0));
            const ReflectionCoefficients r = fresnel_reflection(b.material, incidence, carrier);
            for (auto &e : field)
                e = apply_reflection(e, s_in, s_out, n, r);
            break;
        }
        case InteractionKind::VerticalEdgeDiffraction: {
            const std::size_t ei = scene.facade_index(bi, 0) + (rec.element.element_id - nv);
            const VerticalEdge &edge = scene.edges()[ei];
            WedgeGeometry w;
            w.n = edge.wedge_n;
            w.phi_incident = wedge_angle(scene, edge, (-s_in).xy());
            w.phi_diffracted = wedge_angle(scene, edge, s_out.xy());
            w.beta0 = std::acos(std::clamp(s_in.z, -1.0, 1.0));
            w.s_incident = travelled;
            w.s_diffracted = total - travelled;
            const DiffractionCoefficients d = utd_vertical_edge(w, carrier, b.material, b.material);
            for (auto &e : field)
                e = apply_edge_diffraction(e, s_in, s_out, d);
            spreading = lambda / (4.0 * kPi) / std::sqrt(w.s_incident * w.s_diffracted * (w.s_incident + w.s_diffracted));
            break;
        }
        case InteractionKind::RooftopDiffraction: {
            // A run of roof edges of one building at one height is a flat roof, treated as a single
            // equivalent edge at the crossing of its two outer ray segments.
            std::size_t j = i;
            while (j + 1 < interactions.size() && interactions[j + 1].kind == InteractionKind::RooftopDiffraction &&
                   interactions[j + 1].element.object_id == rec.element.object_id && vertices[j + 2].z == vertices[i + 1].z)
                ++j;
            const bool run_start = i == 0 || !(interactions[i - 1].kind == InteractionKind::RooftopDiffraction &&
                                               interactions[i - 1].element.object_id == rec.element.object_id &&
                                               vertices[i].z == vertices[i + 1].z);
            if (run_start)
                scalar *= roof_factor(vertices[i], vertices[i + 1], vertices[j + 1], vertices[j + 2], k, lambda);
            for (auto &e : field)
                e = apply_bend(e, s_in, s_out, 1.0);
            break;
        }
        case InteractionKind::Scattering:
            throw std::invalid_argument("compose_path_matrix: scattering handled by the PO module");
        }
    }

    const cdouble common = tx_antenna.amplitude() * rx_antenna.amplitude() * spreading * scalar * std::polar(1.0, -k * total);
    PolMatrix t;
    for (int q = 0; q < 2; ++q)
        for (int p = 0; p < 2; ++p)
            t.m[p][q] = common * dot(field[q], rx_basis[static_cast<Pol>(p)]);
    return t;
}

} // namespace railchan
