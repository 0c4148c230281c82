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

#include <algorithm>
#include <stdexcept>

namespace railchan
{

namespace
{

constexpr double kAngleTolerance = 1e-9;

// Diffraction point on a vertical edge for a ray from a to b (Keller cone: equal angles with
// the edge on both sides, found by unfolding the horizontal distances).
std::optional<Vec3> edge_point(const VerticalEdge &e, const Vec3 &a, const Vec3 &b)
{
    const double da = norm(a.xy() - e.position), db = norm(b.xy() - e.position);
    if (da < kEpsGeom || db < kEpsGeom)
        return std::nullopt;
    const double z = a.z + (b.z - a.z) * da / (da + db);
    if (z < 0.0 || z > e.height)
        return std::nullopt;
    return Vec3{e.position.x, e.position.y, z};
}

bool outside_wedge(const Scene &scene, const VerticalEdge &e, const Vec2 &towards)
{
    if (norm(towards) < kEpsGeom)
        return false;
    const double phi = wedge_angle(scene, e, towards);
    return phi >= -kAngleTolerance && phi <= e.wedge_n * kPi + kAngleTolerance;
}

bool segments_clear(const Scene &scene, std::span<const Vec3> vertices)
{
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
        if (!scene.is_los(vertices[i], vertices[i + 1]))
            return false;
    return true;
}

InteractionRecord reflection(const Scene &scene, std::size_t facade, const Vec3 &p)
{
    return {InteractionKind::Reflection, scene.facade_ref(facade), p};
}

InteractionRecord edge_diffraction(const Scene &scene, std::size_t edge, const Vec3 &p)
{
    return {InteractionKind::VerticalEdgeDiffraction, scene.edge_ref(edge), p};
}

} // namespace

std::optional<Vec3> facade_crossing(const Facade &f, const Vec3 &x, const Vec3 &y)
{
    const double sx = f.signed_distance(x.xy()), sy = f.signed_distance(y.xy());
    if (sx == sy)
        return std::nullopt;
    const double t = sx / (sx - sy);
    if (t < 0.0 || t > 1.0)
        return std::nullopt;
    const Vec3 p = lerp(x, y, t);
    const double u = dot(p.xy() - f.start, f.direction);
    if (u < 0.0 || u > f.length || p.z < 0.0 || p.z > f.height)
        return std::nullopt;
    return p;
}

SpecularTracer::SpecularTracer(const Scene &scene, const Vec3 &tx, const CarrierConfig &carrier, const TraceLimits &limits,
                               const AntennaConfig &tx_antenna, const AntennaConfig &rx_antenna)
    : scene_(scene), tx_(tx), carrier_(carrier), limits_(limits), tx_antenna_(tx_antenna), rx_antenna_(rx_antenna)
{
    if (!is_finite(tx))
        throw std::domain_error("tracer: non-finite transmitter position");
    if (scene.inside_building(tx))
        throw std::domain_error("tracer: transmitter inside a building");
    if (limits.max_reflections < 0 || limits.max_reflections > 2)
        throw std::invalid_argument("tracer: max_reflections must be within 0..2");
    if (limits.max_vertical_diffractions < 0 || limits.max_vertical_diffractions > 1)
        throw std::invalid_argument("tracer: max_vertical_diffractions must be within 0..1");

    const auto &facades = scene.facades();

    if (limits.max_reflections >= 1)
    {
        for (std::size_t f = 0; f < facades.size(); ++f)
            if (facades[f].signed_distance(tx.xy()) > kEpsGeom)
                nodes_.push_back({-1, f, facades[f].mirror(tx), facades[f].start, facades[f].end, 1});
    }
    const std::size_t first_order = nodes_.size();

    if (limits.max_reflections >= 2)
    {
        for (std::size_t ni = 0; ni < first_order; ++ni)
        {
            const BeamNode parent = nodes_[ni];
            const Facade &pf = facades[parent.facade];
            const Vec2 apex = parent.image.xy();
            const Vec2 A = parent.aperture_a - apex, B = parent.aperture_b - apex;
            const double orient = cross(A, B) > 0.0 ? 1.0 : -1.0;
            for (std::size_t g = 0; g < facades.size(); ++g)
            {
                if (g == parent.facade)
                    continue;
                const Facade &gf = facades[g];
                if (gf.signed_distance(apex) <= kEpsGeom)
                    continue;
                // Clip facade g against the parent beam: front half-plane of the parent facade and
                // the cone through the aperture.
                double t0 = 0.0, t1 = 1.0;
                const auto clip = [&](double v0, double v1) {
                    if (v0 < 0.0 && v1 < 0.0)
                        return false;
                    if (v0 < 0.0)
                        t0 = std::max(t0, v0 / (v0 - v1));
                    else if (v1 < 0.0)
                        t1 = std::min(t1, v0 / (v0 - v1));
                    return true;
                };
                const auto front = [&](const Vec2 &q) { return pf.signed_distance(q) - kEpsGeom; };
                const auto side_a = [&](const Vec2 &q) { return orient * cross(A, q - apex); };
                const auto side_b = [&](const Vec2 &q) { return orient * cross(q - apex, B); };
                if (!clip(front(gf.start), front(gf.end)) || !clip(side_a(gf.start), side_a(gf.end)) ||
                    !clip(side_b(gf.start), side_b(gf.end)))
                    continue;
                if ((t1 - t0) * gf.length <= kEpsGeom)
                    continue;
                const Vec2 d = gf.end - gf.start;
                nodes_.push_back({static_cast<int>(ni), g, gf.mirror(parent.image), gf.start + d * t0, gf.start + d * t1, 2});
            }
        }
    }

    if (limits.max_vertical_diffractions >= 1)
    {
        const auto &edges = scene.edges();
        for (std::size_t e = 0; e < edges.size(); ++e)
        {
            if (!edges[e].convex)
                continue;
            if (outside_wedge(scene, edges[e], tx.xy() - edges[e].position))
                tx_edges_.push_back(e);
            if (limits.max_reflections >= 1)
            {
                for (std::size_t ni = 0; ni < first_order; ++ni)
                    if (in_beam(nodes_[ni], edges[e].position))
                        rd_pairs_.emplace_back(ni, e);
            }
        }
        if (limits.max_reflections >= 1)
        {
            for (std::size_t e : tx_edges_)
                for (std::size_t f = 0; f < facades.size(); ++f)
                    if (facades[f].signed_distance(edges[e].position) > kEpsGeom)
                        dr_pairs_.emplace_back(e, f);
        }
    }
}

bool SpecularTracer::in_beam(const BeamNode &node, const Vec2 &q) const
{
    const Facade &f = scene_.facades()[node.facade];
    if (f.signed_distance(q) <= kEpsGeom)
        return false;
    const Vec2 apex = node.image.xy();
    const Vec2 A = node.aperture_a - apex, B = node.aperture_b - apex, Q = q - apex;
    const double orient = cross(A, B) > 0.0 ? 1.0 : -1.0;
    return orient * cross(A, Q) >= 0.0 && orient * cross(Q, B) >= 0.0;
}

bool SpecularTracer::finish(RayPath &path) const
{
    update_path_geometry(path);
    path.transfer = compose_path_matrix(scene_, path.vertices, path.interactions, carrier_, tx_antenna_, rx_antenna_);
    const double peak = path.transfer.max_abs();
    return peak > 0.0 && -20.0 * std::log10(peak) <= limits_.loss_floor_db;
}

void SpecularTracer::trace_reflections(const Vec3 &rx, std::vector<RayPath> &out) const
{
    const auto &facades = scene_.facades();
    for (const BeamNode &node : nodes_)
    {
        if (!in_beam(node, rx.xy()))
            continue;
        // Backtrack from the receiver through the image chain.
        std::array<std::size_t, 2> chain{};
        std::array<Vec3, 2> images{};
        int depth = 0;
        for (const BeamNode *n = &node; n; n = n->parent >= 0 ? &nodes_[n->parent] : nullptr)
        {
            chain[depth] = n->facade;
            images[depth] = n->image;
            ++depth;
        }
        std::array<Vec3, 2> points{};
        Vec3 target = rx;
        bool ok = true;
        for (int i = 0; i < depth && ok; ++i)
        {
            const auto p = facade_crossing(facades[chain[i]], images[i], target);
            if (!p)
                ok = false;
            else
                points[i] = target = *p;
        }
        if (!ok)
            continue;

        RayPath path;
        path.vertices.push_back(tx_);
        for (int i = depth - 1; i >= 0; --i)
        {
            path.vertices.push_back(points[i]);
            path.interactions.push_back(reflection(scene_, chain[i], points[i]));
        }
        path.vertices.push_back(rx);
        if (!segments_clear(scene_, path.vertices))
            continue;
        if (finish(path))
            out.push_back(std::move(path));
    }
}

void SpecularTracer::trace_edge_paths(const Vec3 &rx, std::vector<RayPath> &out) const
{
    const auto &edges = scene_.edges();
    const auto &facades = scene_.facades();

    // D
    for (std::size_t e : tx_edges_)
    {
        const VerticalEdge &edge = edges[e];
        if (!outside_wedge(scene_, edge, rx.xy() - edge.position))
            continue;
        const auto d = edge_point(edge, tx_, rx);
        if (!d)
            continue;
        RayPath path;
        path.vertices = {tx_, *d, rx};
        path.interactions = {edge_diffraction(scene_, e, *d)};
        if (segments_clear(scene_, path.vertices) && finish(path))
            out.push_back(std::move(path));
    }

    if (limits_.max_reflections < 1)
        return;

    // R then D
    for (const auto &[ni, e] : rd_pairs_)
    {
        const BeamNode &node = nodes_[ni];
        const VerticalEdge &edge = edges[e];
        if (!outside_wedge(scene_, edge, rx.xy() - edge.position))
            continue;
        const auto d = edge_point(edge, node.image, rx);
        if (!d)
            continue;
        const auto p = facade_crossing(facades[node.facade], node.image, *d);
        if (!p || !outside_wedge(scene_, edge, p->xy() - edge.position))
            continue;
        RayPath path;
        path.vertices = {tx_, *p, *d, rx};
        path.interactions = {reflection(scene_, node.facade, *p), edge_diffraction(scene_, e, *d)};
        if (segments_clear(scene_, path.vertices) && finish(path))
            out.push_back(std::move(path));
    }

    // D then R
    for (const auto &[e, f] : dr_pairs_)
    {
        const Facade &facade = facades[f];
        if (facade.signed_distance(rx.xy()) <= kEpsGeom)
            continue;
        const VerticalEdge &edge = edges[e];
        const Vec3 rx_image = facade.mirror(rx);
        const auto tu = intersect_lines_2d(edge.position, rx_image.xy(), facade.start, facade.end);
        if (!tu || tu->first <= 0.0 || tu->first >= 1.0 || tu->second < 0.0 || tu->second > 1.0)
            continue;
        const auto d = edge_point(edge, tx_, rx_image);
        if (!d)
            continue;
        const auto p = facade_crossing(facade, *d, rx_image);
        if (!p || !outside_wedge(scene_, edge, p->xy() - edge.position))
            continue;
        RayPath path;
        path.vertices = {tx_, *d, *p, rx};
        path.interactions = {edge_diffraction(scene_, e, *d), reflection(scene_, f, *p)};
        if (segments_clear(scene_, path.vertices) && finish(path))
            out.push_back(std::move(path));
    }
}

std::vector<RayPath> SpecularTracer::trace(const Vec3 &rx) const
{
    if (!is_finite(rx))
        throw std::domain_error("tracer: non-finite receiver position");
    if (distance(rx, tx_) <= kEpsGeom)
        throw std::domain_error("tracer: transmitter and receiver coincide");
    if (scene_.inside_building(rx))
        throw std::domain_error("tracer: receiver inside a building");

    std::vector<RayPath> out;
    const bool los = scene_.is_los(tx_, rx);
    if (los)
    {
        RayPath path;
        path.vertices = {tx_, rx};
        if (finish(path))
            out.push_back(std::move(path));
    }
    trace_reflections(rx, out);
    if (limits_.max_vertical_diffractions >= 1)
        trace_edge_paths(rx, out);
    if (limits_.rooftop && !los)
    {
        if (auto roof = trace_rooftop(scene_, tx_, rx, carrier_, tx_antenna_, rx_antenna_))
        {
            const double peak = roof->transfer.max_abs();
            if (peak > 0.0 && -20.0 * std::log10(peak) <= limits_.loss_floor_db)
                out.push_back(std::move(*roof));
        }
    }
    return out;
}

std::vector<RayPath> trace_specular(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const CarrierConfig &carrier,
                                    const TraceLimits &limits, const AntennaConfig &tx_antenna, const AntennaConfig &rx_antenna)
{
    return SpecularTracer(scene, tx, carrier, limits, tx_antenna, rx_antenna).trace(rx);
}

std::optional<RayPath> trace_rooftop(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const CarrierConfig &carrier,
                                     const AntennaConfig &tx_antenna, const AntennaConfig &rx_antenna)
{
    if (scene.is_los(tx, rx))
        return std::nullopt;
    const Vec2 p = tx.xy(), q = rx.xy();
    const double span = norm(q - p);
    if (span < kEpsGeom)
        return std::nullopt;

    struct Crossing
    {
        double s = 0.0; // horizontal distance from tx
        double z = 0.0;
        Vec2 point;
        ElementRef ref;
    };
    std::vector<Crossing> crossings;
    const auto &facades = scene.facades();
    for (std::size_t f = 0; f < facades.size(); ++f)
    {
        const auto tu = intersect_lines_2d(p, q, facades[f].start, facades[f].end);
        if (!tu)
            continue;
        const auto [t, u] = *tu;
        if (t <= 0.0 || t >= 1.0 || u < 0.0 || u > 1.0)
            continue;
        crossings.push_back({t * span, facades[f].height, p + (q - p) * t, scene.facade_ref(f)});
    }
    std::sort(crossings.begin(), crossings.end(), [](const Crossing &a, const Crossing &b) {
        return a.s != b.s ? a.s < b.s : a.ref < b.ref;
    });
    // A crossing exactly through a footprint vertex touches two facades; keep the lower id.
    crossings.erase(std::unique(crossings.begin(), crossings.end(),
                                [](const Crossing &a, const Crossing &b) { return std::abs(a.s - b.s) < 1e-9 && a.z == b.z; }),
                    crossings.end());

    // Upper hull of the profile (taut string over the roofs). Colinear edges stay on the hull.
    struct ProfilePoint
    {
        double s, z;
        int crossing; // -1 for the antennas
    };
    std::vector<ProfilePoint> pts;
    pts.push_back({0.0, tx.z, -1});
    for (std::size_t i = 0; i < crossings.size(); ++i)
        pts.push_back({crossings[i].s, crossings[i].z, static_cast<int>(i)});
    pts.push_back({span, rx.z, -1});

    const double tol = 1e-9 * std::max(1.0, span);
    std::vector<ProfilePoint> hull;
    for (const ProfilePoint &pt : pts)
    {
        while (hull.size() >= 2)
        {
            const ProfilePoint &a = hull[hull.size() - 2], &b = hull.back();
            const double turn = (b.s - a.s) * (pt.z - b.z) - (b.z - a.z) * (pt.s - b.s);
            if (turn > tol)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    if (hull.size() <= 2)
        return std::nullopt;

    RayPath path;
    path.vertices.push_back(tx);
    for (std::size_t i = 1; i + 1 < hull.size(); ++i)
    {
        const Crossing &c = crossings[hull[i].crossing];
        const Vec3 v{c.point.x, c.point.y, c.z};
        path.vertices.push_back(v);
        path.interactions.push_back({InteractionKind::RooftopDiffraction, c.ref, v});
    }
    path.vertices.push_back(rx);
    if (!segments_clear(scene, path.vertices))
        return std::nullopt;
    update_path_geometry(path);
    path.transfer = compose_path_matrix(scene, path.vertices, path.interactions, carrier, tx_antenna, rx_antenna);
    return path;
}

} // namespace railchan
