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

#ifndef RAILCHAN_PO_HPP
#define RAILCHAN_PO_HPP

#include "railchan/em.hpp"
#include "railchan/paths.hpp"
#include "railchan/scene.hpp"

#include <optional>
#include <vector>

namespace railchan
{

// Flat rectangular PEC facet. Edges a_hat (length a) and b_hat (length b) span the facet.
struct Facet
{
    Vec3 center;
    Vec3 normal; // outward
    Vec3 a_hat, b_hat;
    double a = 0.0, b = 0.0;
    double area = 0.0;
};

struct FacetMesh
{
    int scatterer_id = -1; // -1 for free-standing test meshes
    std::vector<Facet> facets;
    Vec3 center; // reference for RCS ranges

    // Bounding cylinder; radius 0 disables the inside check.
    Vec3 axis_base;
    double radius = 0.0;
    double height = 0.0;
};

// Lateral surface of a vertical cylinder, tangent-plane facets of at most `facet_size` per side
// (half a wavelength when facet_size <= 0).
FacetMesh mesh_cylinder(const CylinderScatterer &cyl, const CarrierConfig &carrier, double facet_size = 0.0);

// Rectangular plate centred at `center`, spanned by `a_dir` and normal x a_dir.
FacetMesh mesh_plate(const Vec3 &center, const Vec3 &normal, const Vec3 &a_dir, double size_a, double size_b, double facet_size);

// Specular mirror seen by a leg: facade plane plus its material.
struct LegMirror
{
    Vec2 point;
    Vec3 normal;
    Material material;
    ElementRef element;
};

// Propagation leg from an antenna to the scatterer reference point, direct or via one facade.
struct ScatterLeg
{
    std::vector<Vec3> polyline;                    // antenna, [reflection point], reference point
    std::vector<InteractionRecord> interactions;   // empty or one reflection
    Vec3 source;                                   // antenna or its image across the mirror
    std::optional<LegMirror> mirror;
    bool unobstructed = true;

    double length() const { return polyline_length(polyline); }
};

struct ScatterContribution
{
    PolMatrix transfer;
    double delay = 0.0; // s, sum of both leg lengths / c
    std::size_t active_facets = 0;
};

// Discretised PO sum over facets that are illuminated from the incident leg and visible from the
// scattered leg. Both legs start at their antenna. Swapping the legs transposes the result.
ScatterContribution po_scattered_matrix(const FacetMesh &mesh, const ScatterLeg &incident, const ScatterLeg &scattered,
                                        const CarrierConfig &carrier, const AntennaConfig &tx_antenna = {},
                                        const AntennaConfig &rx_antenna = {});

// Bistatic RCS of a mesh for free-space source/observer points, ranges taken from mesh.center.
double bistatic_rcs(const FacetMesh &mesh, const Vec3 &source, const Vec3 &observer, const CarrierConfig &carrier,
                    PolPair pol = kVV);

std::size_t count_active_facets(const FacetMesh &mesh, const Vec3 &source, const Vec3 &observer);

// Point on the cylinder surface used as the nominal scattering location for a (source, observer)
// pair: bisector azimuth, height from unfolding both horizontal distances onto the axis.
Vec3 scatter_reference_point(const CylinderScatterer &cyl, const Vec3 &source, const Vec3 &observer);

enum class ScatterPolicy
{
    Off,
    Direct,
    DirectAndReflection,
};

// Scatter-path enumerator with cached meshes; one instance per (scene, carrier).
class ScatterEngine
{
  public:
    ScatterEngine(const Scene &scene, const CarrierConfig &carrier, ScatterPolicy policy, double facet_size = 0.0,
                  const AntennaConfig &tx_antenna = {}, const AntennaConfig &rx_antenna = {});

    std::vector<RayPath> paths(const Vec3 &tx, const Vec3 &rx) const;

    const std::vector<FacetMesh> &meshes() const { return meshes_; }

  private:
    // Facades that may host the reflection of a leg between `antenna` and the scatterer; the
    // first entry (nullopt) is the direct leg.
    std::vector<std::optional<std::size_t>> candidate_mirrors(std::size_t scatterer, const Vec3 &antenna) const;
    std::optional<ScatterLeg> make_leg(const Vec3 &antenna, std::optional<std::size_t> facade, const Vec3 &reference) const;

    const Scene &scene_;
    CarrierConfig carrier_;
    ScatterPolicy policy_;
    AntennaConfig tx_antenna_, rx_antenna_;
    std::vector<FacetMesh> meshes_;
};

std::vector<RayPath> enumerate_scatter_paths(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const CarrierConfig &carrier,
                                             ScatterPolicy policy, const AntennaConfig &tx_antenna = {},
                                             const AntennaConfig &rx_antenna = {});

} // namespace railchan

#endif
