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

#ifndef RAILCHAN_EM_HPP
#define RAILCHAN_EM_HPP

#include "railchan/paths.hpp"
#include "railchan/polarization.hpp"
#include "railchan/scene.hpp"

#include <span>

namespace railchan
{

struct CarrierConfig
{
    double frequency = 1.9e9; // Hz

    double wavelength() const { return kSpeedOfLight / frequency; }
    double wavenumber() const { return 2.0 * kPi / wavelength(); }
};

// Omnidirectional dual-polar V/H antenna.
struct AntennaConfig
{
    double gain_dbi = 0.0;

    double amplitude() const { return std::pow(10.0, gain_dbi / 20.0); }
};

// (lambda / (4 pi d)) exp(-j 2 pi d / lambda). Throws std::domain_error for d <= 0.
cdouble free_space_transport(double distance, const CarrierConfig &carrier);

struct ReflectionCoefficients
{
    cdouble te; // E perpendicular to the plane of incidence
    cdouble tm; // E in the plane of incidence
};

// Lossy-dielectric Fresnel coefficients; incidence angle measured from the surface normal.
// Basis: e_perp = k_in x n, e_par = e_perp x k (for both the incident and reflected wave),
// in which a perfect conductor gives (-1, +1).
ReflectionCoefficients fresnel_reflection(const Material &material, double incidence_angle, const CarrierConfig &carrier);

// Fresnel-Kirchhoff diffraction parameter for an obstruction of height h above the line of
// sight at distances d1, d2 from its ends.
double knife_edge_v(double h, double d1, double d2, double wavelength);

// Complex knife-edge field ratio F(v) = ((1 + j)/2) int_v^inf exp(-j pi t^2/2) dt.
cdouble knife_edge_diffraction(double v);
double knife_edge_loss_db(double v);

struct WedgeGeometry
{
    double n = 1.5;              // exterior wedge angle / pi
    double phi_incident = 0.0;   // angle of the source side from face 0, rad
    double phi_diffracted = 0.0; // angle of the observer side from face 0, rad
    double beta0 = kPi / 2.0;    // angle between incident ray and edge, rad
    double s_incident = 0.0;     // source distance to the diffraction point, m
    double s_diffracted = 0.0;   // diffraction point to observer distance, m
};

struct DiffractionCoefficients
{
    cdouble soft; // E parallel to the edge (beta components)
    cdouble hard; // E perpendicular to the edge (phi components)
};

// Kouyoumjian-Pathak wedge coefficients with face reflection coefficients multiplying the
// reflection-boundary terms. Both faces are evaluated at the grazing angle
// (pi - |phi - phi'|)/2, which keeps the coefficient symmetric under source/observer swap.
DiffractionCoefficients utd_vertical_edge(const WedgeGeometry &wedge, const CarrierConfig &carrier,
                                          const Material &face_0, const Material &face_n);

// Angle of a horizontal direction measured from face 0 through the exterior of the wedge.
double wedge_angle(const Scene &scene, const VerticalEdge &edge, const Vec2 &direction);

// Polarimetric transfer matrix of a validated path (vertices tx..rx with one record per interior
// vertex). Scattering records are not accepted here; see po.hpp.
PolMatrix compose_path_matrix(const Scene &scene, std::span<const Vec3> vertices, std::span<const InteractionRecord> interactions,
                              const CarrierConfig &carrier, const AntennaConfig &tx_antenna, const AntennaConfig &rx_antenna);

// Field vector after one interaction applied to E travelling along s_in, leaving along s_out.
// Only the polarization dyad is applied; spreading is handled by compose_path_matrix.
CVec3 apply_reflection(const CVec3 &e, const Vec3 &s_in, const Vec3 &s_out, const Vec3 &normal, const ReflectionCoefficients &r);

} // namespace railchan

#endif
