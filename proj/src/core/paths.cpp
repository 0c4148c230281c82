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

#include "railchan/paths.hpp"

#include <algorithm>

namespace railchan
{

char kind_letter(InteractionKind k)
{
    switch (k)
    {
    case InteractionKind::Reflection:
        return 'R';
    case InteractionKind::VerticalEdgeDiffraction:
        return 'D';
    case InteractionKind::RooftopDiffraction:
        return 'T';
    case InteractionKind::Scattering:
        return 'S';
    }
    return '?';
}

std::string to_string(const Signature &s)
{
    if (s.empty())
        return "LOS";
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        if (i > 0)
            out += '>';
        out += kind_letter(s[i].kind);
        out += '(';
        out += s[i].element.object_class == ObjectClass::Scatterer ? 'p' : 'b';
        out += std::to_string(s[i].element.object_id);
        out += '.';
        out += std::to_string(s[i].element.element_id);
        out += ')';
    }
    return out;
}

Signature reversed(Signature s)
{
    std::reverse(s.begin(), s.end());
    return s;
}

Signature RayPath::signature() const
{
    Signature s;
    s.reserve(interactions.size());
    for (const auto &r : interactions)
        s.push_back({r.kind, r.element});
    return s;
}

void update_path_geometry(RayPath &path)
{
    path.length = polyline_length(path.vertices);
    path.delay = path.length / kSpeedOfLight;
    const std::size_t n = path.vertices.size();
    if (n >= 2)
    {
        path.aod = direction_of(path.vertices[1] - path.vertices[0]);
        path.aoa = direction_of(path.vertices[n - 2] - path.vertices[n - 1]);
    }
}

} // namespace railchan
