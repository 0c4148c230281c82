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

#ifndef RAILCHAN_PATHS_HPP
#define RAILCHAN_PATHS_HPP

#include "railchan/geometry.hpp"
#include "railchan/polarization.hpp"
#include "railchan/scene.hpp"

#include <compare>
#include <string>
#include <vector>

namespace railchan
{

enum class InteractionKind
{
    Reflection = 0,
    VerticalEdgeDiffraction = 1,
    RooftopDiffraction = 2,
    Scattering = 3,
};

char kind_letter(InteractionKind k);

struct InteractionRecord
{
    InteractionKind kind = InteractionKind::Reflection;
    ElementRef element;
    Vec3 point;
};

// Kind and element of one interaction; positions are not part of a path's identity.
struct SignatureItem
{
    InteractionKind kind = InteractionKind::Reflection;
    ElementRef element;

    auto operator<=>(const SignatureItem &) const = default;
};

using Signature = std::vector<SignatureItem>;

// "LOS" for the direct path, otherwise e.g. "R(b3.1)>D(b7.9)".
std::string to_string(const Signature &s);
Signature reversed(Signature s);

enum class PathTag
{
    Specular = 0,
    Scatter = 1,
};

struct RayPath
{
    std::vector<InteractionRecord> interactions;
    std::vector<Vec3> vertices; // tx, interaction points..., rx
    double length = 0.0;        // m
    double delay = 0.0;         // s
    Direction aod;
    Direction aoa; // direction from the receiver towards the last interaction
    PolMatrix transfer;
    double doppler_hz = 0.0;
    PathTag tag = PathTag::Specular;

    Signature signature() const;
};

// Recompute length, delay and angles from the vertices.
void update_path_geometry(RayPath &path);

} // namespace railchan

#endif
