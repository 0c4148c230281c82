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

#ifndef RAILCHAN_TRACER_HPP
#define RAILCHAN_TRACER_HPP

#include "railchan/em.hpp"
#include "railchan/paths.hpp"
#include "railchan/scene.hpp"

#include <optional>
#include <vector>

namespace railchan
{

struct TraceLimits
{
    int max_reflections = 2;           // 0..2
    int max_vertical_diffractions = 1; // 0..1
    bool rooftop = true;               // over-rooftop paths, any number of roof edges
    double loss_floor_db = 250.0;      // paths weaker than this are dropped
};

// Exact specular tracer for one fixed transmitter.
//
// Image sequences are organised as a 2D beam tree built once per transmitter: every node holds
// the image point and the part of its facade that is reachable through the parent aperture.
// A receiver query only walks nodes whose beam contains it, so the per-position cost scales
// with the number of geometrically possible reflection sequences rather than facades squared.
//
// Interaction combinations: LOS, R, RR, D, RD, DR and the over-rooftop path. Rooftop paths
// are never combined with lateral interactions.
class SpecularTracer
{
  public:
    SpecularTracer(const Scene &scene, const Vec3 &tx, const CarrierConfig &carrier, const TraceLimits &limits = {},
                   const AntennaConfig &tx_antenna = {}, const AntennaConfig &rx_antenna = {});

    std::vector<RayPath> trace(const Vec3 &rx) const;

    const Vec3 &tx() const { return tx_; }
    std::size_t beam_node_count() const { return nodes_.size(); }

  private:
    struct BeamNode
    {
        int parent = -1;
        std::size_t facade = 0;
        Vec3 image;
        Vec2 aperture_a, aperture_b;
        int depth = 1;
    };

    bool in_beam(const BeamNode &node, const Vec2 &q) const;
    void trace_reflections(const Vec3 &rx, std::vector<RayPath> &out) const;
    void trace_edge_paths(const Vec3 &rx, std::vector<RayPath> &out) const;
    bool finish(RayPath &path) const;

    const Scene &scene_;
    Vec3 tx_;
    CarrierConfig carrier_;
    TraceLimits limits_;
    AntennaConfig tx_antenna_, rx_antenna_;

    std::vector<BeamNode> nodes_;
    std::vector<std::size_t> tx_edges_; // convex edges with the transmitter outside the wedge
    std::vector<std::pair<std::size_t, std::size_t>> rd_pairs_; // (order-1 node, edge)
    std::vector<std::pair<std::size_t, std::size_t>> dr_pairs_; // (edge, facade)
};

// Crossing of the segment x->y with the facade plane, or nullopt when it misses the facade.
std::optional<Vec3> facade_crossing(const Facade &f, const Vec3 &x, const Vec3 &y);

// Convenience wrapper building a tracer for a single query.
std::vector<RayPath> trace_specular(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const CarrierConfig &carrier,
                                    const TraceLimits &limits = {}, const AntennaConfig &tx_antenna = {},
                                    const AntennaConfig &rx_antenna = {});

// Over-rooftop path in the vertical plane through tx and rx, or nullopt when the direct path is
// clear or no roof edge obstructs it.
std::optional<RayPath> trace_rooftop(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const CarrierConfig &carrier,
                                     const AntennaConfig &tx_antenna = {}, const AntennaConfig &rx_antenna = {});

} // namespace railchan

#endif
