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

#ifndef RAILCHAN_SCENE_HPP
#define RAILCHAN_SCENE_HPP

#include "railchan/geometry.hpp"

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace railchan
{

// Raised for malformed scene content. The message carries the element location.
class SceneError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct Material
{
    double relative_permittivity = 5.0;
    double conductivity = 0.1; // S/m
    bool is_pec = false;

    static Material pec() { return {1.0, 0.0, true}; }
    bool operator==(const Material &) const = default;
};

struct Building
{
    int id = 0;
    std::vector<Vec2> footprint; // counterclockwise after scene construction
    double height = 0.0;
    Material material;
};

struct CylinderScatterer
{
    int id = 0;
    Vec3 base_center;
    double radius = 0.0;
    double height = 0.0;
    Material material = Material::pec();
};

enum class ObjectClass
{
    Ground = 0,
    Building = 1,
    Scatterer = 2,
};

// Stable reference to a scene element.
//
// Building element ids for a footprint with n vertices:
//   facade k (vertex k -> vertex k+1)   element_id = k
//   vertical edge at vertex k           element_id = n + k
//   rooftop polygon                     element_id = 2n
struct ElementRef
{
    ObjectClass object_class = ObjectClass::Ground;
    int object_id = 0;
    int element_id = 0;

    auto operator<=>(const ElementRef &) const = default;
};

struct Hit
{
    Vec3 point;
    ElementRef element;
    double distance = 0.0;
};

struct Segment3
{
    Vec3 a, b;
};

// Vertical rectangle spanned by one footprint edge.
struct Facade
{
    std::size_t building = 0; // index into Scene::buildings()
    int element_id = 0;
    Vec2 start, end;
    Vec2 direction; // unit, start -> end
    Vec2 normal;    // unit, outward
    double length = 0.0;
    double height = 0.0;

    // Signed distance of a point from the facade plane, positive in front.
    double signed_distance(const Vec2 &p) const { return dot(p - start, normal); }
    Vec3 normal3() const { return {normal.x, normal.y, 0.0}; }
    Vec3 mirror(const Vec3 &p) const
    {
        const double d = signed_distance(p.xy());
        return {p.x - 2.0 * d * normal.x, p.y - 2.0 * d * normal.y, p.z};
    }
};

// Vertical edge at a footprint vertex, modelled as a wedge between its two facades.
struct VerticalEdge
{
    std::size_t building = 0;
    int element_id = 0;
    Vec2 position;
    double height = 0.0;
    std::size_t face_0 = 0; // facade index (global) leaving the vertex
    std::size_t face_n = 0; // facade index (global) arriving at the vertex
    double wedge_n = 1.5;   // exterior angle / pi
    bool convex = true;
};

class Scene
{
  public:
    static constexpr double kDefaultCellSize = 25.0;

    Scene() = default;
    Scene(std::vector<Building> buildings,
          std::vector<CylinderScatterer> scatterers,
          Material ground_material = Material{15.0, 0.005, false},
          double cell_size = kDefaultCellSize);

    const std::vector<Building> &buildings() const { return buildings_; }
    const std::vector<CylinderScatterer> &scatterers() const { return scatterers_; }
    const Material &ground_material() const { return ground_material_; }

    const std::vector<Facade> &facades() const { return facades_; }
    const std::vector<VerticalEdge> &edges() const { return edges_; }

    // Global facade index of (building index, facade element id).
    std::size_t facade_index(std::size_t building, int element_id) const { return facade_offset_[building] + element_id; }
    std::size_t building_index(int building_id) const;

    ElementRef facade_ref(std::size_t facade) const;
    ElementRef edge_ref(std::size_t edge) const;

    // Copy of this scene without scatterers.
    Scene without_scatterers() const;

    // Nearest hit strictly between the endpoints (kEpsGeom exclusion), using the grid index.
    std::optional<Hit> first_hit(const Segment3 &segment) const;

    // Same query by exhaustive scan over every building; the test oracle for the grid.
    std::optional<Hit> first_hit_bruteforce(const Segment3 &segment) const;

    bool is_los(const Vec3 &p, const Vec3 &q) const;

    // True when the point lies inside (or on the boundary of) a building volume.
    bool inside_building(const Vec3 &p) const;

    std::size_t grid_cell_count() const { return cells_.size(); }

  private:
    void build_elements();
    void build_grid(double cell_size);
    void intersect_building(std::size_t b, const Segment3 &s, double len, std::optional<Hit> &best) const;
    void intersect_ground(const Segment3 &s, double len, std::optional<Hit> &best) const;
    void collect_candidates(const Segment3 &s, std::vector<std::size_t> &out) const;

    std::vector<Building> buildings_;
    std::vector<CylinderScatterer> scatterers_;
    Material ground_material_;

    std::vector<Facade> facades_;
    std::vector<VerticalEdge> edges_;
    std::vector<std::size_t> facade_offset_;
    std::map<int, std::size_t> building_by_id_;

    // Uniform 2D grid over footprints.
    Vec2 grid_origin_;
    double cell_ = kDefaultCellSize;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<std::size_t>> cells_;
};

// Parse scene-file text (JSON, see docs/formats.md). Throws SceneError.
Scene load_scene(std::string_view text);
Scene load_scene_file(const std::string &path);

// Deterministic ordering for two hits at (numerically) equal distance.
bool hit_precedes(const Hit &a, const Hit &b);

} // namespace railchan

#endif
