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

#include "railchan/scene.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace railchan
{

namespace
{

constexpr double kTieTolerance = 1e-9;

std::string at(std::string_view where, std::size_t i) { return std::string(where) + "[" + std::to_string(i) + "]"; }

void check_material(const Material &m, const std::string &where)
{
    if (m.is_pec)
        return;
    if (!(m.relative_permittivity >= 1.0) || !std::isfinite(m.relative_permittivity))
        throw SceneError(where + ": relative permittivity must be >= 1");
    if (!(m.conductivity >= 0.0) || !std::isfinite(m.conductivity))
        throw SceneError(where + ": conductivity must be >= 0");
}

} // namespace

bool hit_precedes(const Hit &a, const Hit &b)
{
    if (a.distance < b.distance - kTieTolerance)
        return true;
    if (a.distance > b.distance + kTieTolerance)
        return false;
    return a.element < b.element;
}

Scene::Scene(std::vector<Building> buildings, std::vector<CylinderScatterer> scatterers, Material ground_material, double cell_size)
    : buildings_(std::move(buildings)), scatterers_(std::move(scatterers)), ground_material_(ground_material)
{
    if (!(cell_size > 0.0))
        throw SceneError("scene: grid cell size must be positive");
    check_material(ground_material_, "ground_material");

    for (std::size_t i = 0; i < buildings_.size(); ++i)
    {
        Building &b = buildings_[i];
        const std::string where = at("buildings", i);
        auto &fp = b.footprint;
        if (fp.size() >= 2 && fp.front() == fp.back())
            fp.pop_back();
        if (fp.size() < 3)
            throw SceneError(where + ".footprint: polygon needs at least 3 vertices");
        for (const Vec2 &v : fp)
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw SceneError(where + ".footprint: non-finite vertex");
        if (!is_simple_polygon(fp))
            throw SceneError(where + ".footprint: polygon is not simple (self-intersecting or degenerate)");
        if (signed_area(fp) < 0.0)
            std::reverse(fp.begin(), fp.end());
        if (!(b.height > 0.0) || !std::isfinite(b.height))
            throw SceneError(where + ".height: must be positive");
        check_material(b.material, where + ".material");
        if (!building_by_id_.emplace(b.id, i).second)
            throw SceneError(where + ".id: duplicate building id " + std::to_string(b.id));
    }

    std::set<int> scatterer_ids;
    for (std::size_t i = 0; i < scatterers_.size(); ++i)
    {
        const CylinderScatterer &c = scatterers_[i];
        const std::string where = at("scatterers", i);
        if (!(c.radius > 0.0) || !std::isfinite(c.radius))
            throw SceneError(where + ".radius: must be positive");
        if (!(c.height > 0.0) || !std::isfinite(c.height))
            throw SceneError(where + ".height: must be positive");
        if (!is_finite(c.base_center))
            throw SceneError(where + ".base: non-finite position");
        if (!scatterer_ids.insert(c.id).second)
            throw SceneError(where + ".id: duplicate scatterer id " + std::to_string(c.id));
    }

    build_elements();
    build_grid(cell_size);
}

void Scene::build_elements()
{
    facades_.clear();
    edges_.clear();
    facade_offset_.clear();
    for (std::size_t bi = 0; bi < buildings_.size(); ++bi)
    {
        const Building &b = buildings_[bi];
        const std::size_t n = b.footprint.size();
        facade_offset_.push_back(facades_.size());
        for (std::size_t k = 0; k < n; ++k)
        {
            Facade f;
            f.building = bi;
            f.element_id = static_cast<int>(k);
            f.start = b.footprint[k];
            f.end = b.footprint[(k + 1) % n];
            const Vec2 d = f.end - f.start;
            f.length = norm(d);
            f.direction = d * (1.0 / f.length);
            f.normal = {f.direction.y, -f.direction.x};
            f.height = b.height;
            facades_.push_back(f);
        }
        for (std::size_t k = 0; k < n; ++k)
        {
            VerticalEdge e;
            e.building = bi;
            e.element_id = static_cast<int>(n + k);
            e.position = b.footprint[k];
            e.height = b.height;
            e.face_0 = facade_offset_[bi] + k;
            e.face_n = facade_offset_[bi] + (k + n - 1) % n;
            const Vec2 d_in = facades_[e.face_n].direction, d_out = facades_[e.face_0].direction;
            const double turn = std::atan2(cross(d_in, d_out), dot(d_in, d_out));
            e.convex = turn > 1e-12;
            e.wedge_n = (kPi + turn) / kPi;
            edges_.push_back(e);
        }
    }
}

void Scene::build_grid(double cell_size)
{
    cell_ = cell_size;
    cells_.clear();
    if (buildings_.empty())
    {
        nx_ = ny_ = 0;
        return;
    }
    double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
    for (const Building &b : buildings_)
        for (const Vec2 &v : b.footprint)
        {
            xmin = std::min(xmin, v.x), ymin = std::min(ymin, v.y);
            xmax = std::max(xmax, v.x), ymax = std::max(ymax, v.y);
        }
    const double pad = 1e-3;
    grid_origin_ = {xmin - pad, ymin - pad};
    nx_ = std::max(1, static_cast<int>(std::ceil((xmax - xmin + 2 * pad) / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil((ymax - ymin + 2 * pad) / cell_)));
    cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});

    for (std::size_t bi = 0; bi < buildings_.size(); ++bi)
    {
        double bx0 = 1e300, by0 = 1e300, bx1 = -1e300, by1 = -1e300;
        for (const Vec2 &v : buildings_[bi].footprint)
        {
            bx0 = std::min(bx0, v.x), by0 = std::min(by0, v.y);
            bx1 = std::max(bx1, v.x), by1 = std::max(by1, v.y);
        }
        const auto cx = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - grid_origin_.x) / cell_)), 0, nx_ - 1); };
        const auto cy = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - grid_origin_.y) / cell_)), 0, ny_ - 1); };
        const double m = 1e-6;
        for (int iy = cy(by0 - m); iy <= cy(by1 + m); ++iy)
            for (int ix = cx(bx0 - m); ix <= cx(bx1 + m); ++ix)
                cells_[static_cast<std::size_t>(iy) * nx_ + ix].push_back(bi);
    }
}

std::size_t Scene::building_index(int building_id) const
{
    const auto it = building_by_id_.find(building_id);
    if (it == building_by_id_.end())
        throw std::out_of_range("unknown building id " + std::to_string(building_id));
    return it->second;
}

ElementRef Scene::facade_ref(std::size_t facade) const
{
    const Facade &f = facades_[facade];
    return {ObjectClass::Building, buildings_[f.building].id, f.element_id};
}

ElementRef Scene::edge_ref(std::size_t edge) const
{
    const VerticalEdge &e = edges_[edge];
    return {ObjectClass::Building, buildings_[e.building].id, e.element_id};
}

Scene Scene::without_scatterers() const
{
    Scene s = *this;
    s.scatterers_.clear();
    return s;
}

void Scene::intersect_ground(const Segment3 &s, double len, std::optional<Hit> &best) const
{
    const double dz = s.b.z - s.a.z;
    if (dz == 0.0)
        return;
    const double t = -s.a.z / dz;
    if (t < 0.0 || t > 1.0)
        return;
    const double d = t * len;
    if (d <= kEpsGeom || len - d <= kEpsGeom)
        return;
    Hit h{lerp(s.a, s.b, t), {ObjectClass::Ground, 0, 0}, d};
    h.point.z = 0.0;
    if (!best || hit_precedes(h, *best))
        best = h;
}

void Scene::intersect_building(std::size_t bi, const Segment3 &s, double len, std::optional<Hit> &best) const
{
    const Building &b = buildings_[bi];
    const Vec2 p = s.a.xy(), q = s.b.xy();
    const std::size_t n = b.footprint.size();
    for (std::size_t k = 0; k < n; ++k)
    {
        const Facade &f = facades_[facade_offset_[bi] + k];
        const auto tu = intersect_lines_2d(p, q, f.start, f.end);
        if (!tu)
            continue;
        const auto [t, u] = *tu;
        if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0)
            continue;
        const double z = s.a.z + t * (s.b.z - s.a.z);
        if (z < 0.0 || z > b.height)
            continue;
        const double d = t * len;
        if (d <= kEpsGeom || len - d <= kEpsGeom)
            continue;
        const Hit h{{f.start.x + u * (f.end.x - f.start.x), f.start.y + u * (f.end.y - f.start.y), z},
                    {ObjectClass::Building, b.id, f.element_id},
                    d};
        if (!best || hit_precedes(h, *best))
            best = h;
    }
    const double dz = s.b.z - s.a.z;
    if (dz != 0.0)
    {
        const double t = (b.height - s.a.z) / dz;
        if (t >= 0.0 && t <= 1.0)
        {
            const double d = t * len;
            const Vec3 pt{s.a.x + t * (s.b.x - s.a.x), s.a.y + t * (s.b.y - s.a.y), b.height};
            if (d > kEpsGeom && len - d > kEpsGeom && point_in_polygon(b.footprint, pt.xy()))
            {
                const Hit h{pt, {ObjectClass::Building, b.id, static_cast<int>(2 * n)}, d};
                if (!best || hit_precedes(h, *best))
                    best = h;
            }
        }
    }
}

void Scene::collect_candidates(const Segment3 &s, std::vector<std::size_t> &out) const
{
    out.clear();
    if (cells_.empty())
        return;
    const Vec2 p = s.a.xy(), q = s.b.xy();
    const Vec2 d = q - p;
    const double gx0 = grid_origin_.x, gy0 = grid_origin_.y;
    const double gx1 = gx0 + nx_ * cell_, gy1 = gy0 + ny_ * cell_;

    // Liang-Barsky clip of the projected segment against the grid box.
    double t0 = 0.0, t1 = 1.0;
    const auto clip = [&](double den, double num) {
        if (den == 0.0)
            return num >= 0.0;
        const double r = num / den;
        if (den < 0.0)
        {
            if (r > t1)
                return false;
            t0 = std::max(t0, r);
        }
        else
        {
            if (r < t0)
                return false;
            t1 = std::min(t1, r);
        }
        return true;
    };
    if (!clip(-d.x, p.x - gx0) || !clip(d.x, gx1 - p.x) || !clip(-d.y, p.y - gy0) || !clip(d.y, gy1 - p.y))
        return;

    const auto cell_x = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - gx0) / cell_)), 0, nx_ - 1); };
    const auto cell_y = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - gy0) / cell_)), 0, ny_ - 1); };
    const Vec2 start = p + d * t0, end = p + d * t1;
    int ix = cell_x(start.x), iy = cell_y(start.y);
    const int ex = cell_x(end.x), ey = cell_y(end.y);
    const int step_x = d.x > 0.0 ? 1 : (d.x < 0.0 ? -1 : 0);
    const int step_y = d.y > 0.0 ? 1 : (d.y < 0.0 ? -1 : 0);
    const double inf = std::numeric_limits<double>::infinity();
    double t_max_x = inf, t_max_y = inf, t_delta_x = inf, t_delta_y = inf;
    if (step_x != 0)
    {
        const double boundary = gx0 + (ix + (step_x > 0 ? 1 : 0)) * cell_;
        t_max_x = (boundary - p.x) / d.x;
        t_delta_x = cell_ / std::abs(d.x);
    }
    if (step_y != 0)
    {
        const double boundary = gy0 + (iy + (step_y > 0 ? 1 : 0)) * cell_;
        t_max_y = (boundary - p.y) / d.y;
        t_delta_y = cell_ / std::abs(d.y);
    }

    const int max_steps = nx_ + ny_ + 4;
    for (int i = 0; i < max_steps; ++i)
    {
        const auto &cell = cells_[static_cast<std::size_t>(iy) * nx_ + ix];
        out.insert(out.end(), cell.begin(), cell.end());
        if (ix == ex && iy == ey)
            break;
        if (t_max_x < t_max_y)
        {
            ix += step_x;
            t_max_x += t_delta_x;
        }
        else
        {
            iy += step_y;
            t_max_y += t_delta_y;
        }
        if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_)
            break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

std::optional<Hit> Scene::first_hit(const Segment3 &segment) const
{
    const double len = distance(segment.a, segment.b);
    if (len <= kEpsGeom)
        return std::nullopt;
    std::optional<Hit> best;
    intersect_ground(segment, len, best);
    thread_local std::vector<std::size_t> candidates;
    collect_candidates(segment, candidates);
    for (std::size_t bi : candidates)
        intersect_building(bi, segment, len, best);
    return best;
}

std::optional<Hit> Scene::first_hit_bruteforce(const Segment3 &segment) const
{
    const double len = distance(segment.a, segment.b);
    if (len <= kEpsGeom)
        return std::nullopt;
    std::optional<Hit> best;
    intersect_ground(segment, len, best);
    for (std::size_t bi = 0; bi < buildings_.size(); ++bi)
        intersect_building(bi, segment, len, best);
    return best;
}

bool Scene::is_los(const Vec3 &p, const Vec3 &q) const { return !first_hit({p, q}).has_value(); }

bool Scene::inside_building(const Vec3 &p) const
{
    for (const Building &b : buildings_)
        if (p.z >= 0.0 && p.z < b.height && point_in_polygon(b.footprint, p.xy()))
            return true;
    return false;
}

// ---------------------------------------------------------------------------
// Scene file ingestion

namespace
{

using nlohmann::json;

void reject_unknown_keys(const json &obj, std::initializer_list<std::string_view> allowed, const std::string &where)
{
    for (const auto &[key, value] : obj.items())
    {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw SceneError(where + ": unknown key '" + key + "'");
    }
}

double number(const json &obj, const char *key, const std::string &where)
{
    if (!obj.contains(key))
        throw SceneError(where + ": missing '" + key + "'");
    const json &v = obj.at(key);
    if (!v.is_number())
        throw SceneError(where + "." + key + ": expected a number");
    return v.get<double>();
}

int integer(const json &obj, const char *key, const std::string &where)
{
    if (!obj.contains(key) || !obj.at(key).is_number_integer())
        throw SceneError(where + "." + key + ": expected an integer");
    return obj.at(key).get<int>();
}

Material parse_material(const json &m, const std::string &where)
{
    if (!m.is_object())
        throw SceneError(where + ": expected an object");
    reject_unknown_keys(m, {"eps_r", "sigma", "pec"}, where);
    Material mat;
    mat.is_pec = m.value("pec", false);
    if (mat.is_pec)
        return Material::pec();
    mat.relative_permittivity = number(m, "eps_r", where);
    mat.conductivity = m.contains("sigma") ? number(m, "sigma", where) : 0.0;
    check_material(mat, where);
    return mat;
}

Material lookup_material(const json &obj, const std::map<std::string, Material> &materials, const std::string &fallback,
                         const std::string &where)
{
    const std::string name = obj.contains("material") ? obj.at("material").get<std::string>() : fallback;
    const auto it = materials.find(name);
    if (it == materials.end())
        throw SceneError(where + ".material: unknown material '" + name + "'");
    return it->second;
}

} // namespace

Scene load_scene(std::string_view text)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw SceneError(std::string("scene: parse error: ") + e.what());
    }
    if (!doc.is_object())
        throw SceneError("scene: top level must be an object");

    try
    {
        reject_unknown_keys(doc, {"version", "materials", "ground_material", "buildings", "scatterers", "grid_cell_size"}, "scene");
        if (!doc.contains("version"))
            throw SceneError("scene: missing mandatory 'version'");
        if (doc.at("version") != 1)
            throw SceneError("scene.version: unsupported version " + doc.at("version").dump());

        std::map<std::string, Material> materials{{"concrete", Material{5.0, 0.1, false}},
                                                  {"ground", Material{15.0, 0.005, false}},
                                                  {"metal", Material::pec()}};
        if (doc.contains("materials"))
        {
            if (!doc.at("materials").is_object())
                throw SceneError("scene.materials: expected an object");
            for (const auto &[name, m] : doc.at("materials").items())
                materials[name] = parse_material(m, "materials." + name);
        }

        Material ground = materials.at("ground");
        if (doc.contains("ground_material"))
        {
            const std::string name = doc.at("ground_material").get<std::string>();
            if (!materials.contains(name))
                throw SceneError("scene.ground_material: unknown material '" + name + "'");
            ground = materials.at(name);
        }

        std::vector<Building> buildings;
        if (doc.contains("buildings"))
        {
            const json &arr = doc.at("buildings");
            if (!arr.is_array())
                throw SceneError("scene.buildings: expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i)
            {
                const json &b = arr[i];
                const std::string where = at("buildings", i);
                if (!b.is_object())
                    throw SceneError(where + ": expected an object");
                reject_unknown_keys(b, {"id", "footprint", "height", "material", "name"}, where);
                Building out;
                out.id = integer(b, "id", where);
                out.height = number(b, "height", where);
                if (!b.contains("footprint") || !b.at("footprint").is_array())
                    throw SceneError(where + ".footprint: expected an array of [x, y]");
                const json &fp = b.at("footprint");
                for (std::size_t k = 0; k < fp.size(); ++k)
                {
                    if (!fp[k].is_array() || fp[k].size() != 2 || !fp[k][0].is_number() || !fp[k][1].is_number())
                        throw SceneError(where + ".footprint" + "[" + std::to_string(k) + "]: expected [x, y]");
                    out.footprint.push_back({fp[k][0].get<double>(), fp[k][1].get<double>()});
                }
                out.material = lookup_material(b, materials, "concrete", where);
                buildings.push_back(std::move(out));
            }
        }

        std::vector<CylinderScatterer> scatterers;
        if (doc.contains("scatterers"))
        {
            const json &arr = doc.at("scatterers");
            if (!arr.is_array())
                throw SceneError("scene.scatterers: expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i)
            {
                const json &c = arr[i];
                const std::string where = at("scatterers", i);
                if (!c.is_object())
                    throw SceneError(where + ": expected an object");
                reject_unknown_keys(c, {"id", "base", "radius", "height", "material", "name"}, where);
                CylinderScatterer out;
                out.id = integer(c, "id", where);
                if (!c.contains("base") || !c.at("base").is_array() || c.at("base").size() != 3)
                    throw SceneError(where + ".base: expected [x, y, z]");
                const json &base = c.at("base");
                for (const json &v : base)
                    if (!v.is_number())
                        throw SceneError(where + ".base: expected numbers");
                out.base_center = {base[0].get<double>(), base[1].get<double>(), base[2].get<double>()};
                out.radius = number(c, "radius", where);
                out.height = number(c, "height", where);
                out.material = lookup_material(c, materials, "metal", where);
                if (!out.material.is_pec)
                    throw SceneError(where + ".material: only perfectly conducting scatterers are supported");
                scatterers.push_back(out);
            }
        }

        const double cell = doc.contains("grid_cell_size") ? number(doc, "grid_cell_size", "scene") : Scene::kDefaultCellSize;
        return Scene(std::move(buildings), std::move(scatterers), ground, cell);
    }
    catch (const json::exception &e)
    {
        throw SceneError(std::string("scene: ") + e.what());
    }
}

Scene load_scene_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw SceneError("cannot open scene file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try
    {
        return load_scene(ss.str());
    }
    catch (const SceneError &e)
    {
        throw SceneError(path + ": " + e.what());
    }
}

} // namespace railchan
