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

#ifndef RAILCHAN_DYNAMICS_HPP
#define RAILCHAN_DYNAMICS_HPP

#include "railchan/po.hpp"
#include "railchan/tracer.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace railchan
{

// Constant-speed motion along a 3D polyline.
class Trajectory
{
  public:
    Trajectory() = default;
    Trajectory(std::vector<Vec3> waypoints, double speed, double duration);

    Vec3 position(double t) const;
    Vec3 velocity(double t) const;

    const std::vector<Vec3> &waypoints() const { return waypoints_; }
    double speed() const { return speed_; }
    double duration() const { return duration_; }
    double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  private:
    std::size_t segment_at(double s) const;

    std::vector<Vec3> waypoints_;
    std::vector<double> cumulative_;
    double speed_ = 0.0;
    double duration_ = 0.0;
};

// Tracer bundle for one transmitter: specular paths plus optional scatter paths.
class ChannelModel
{
  public:
    ChannelModel(const Scene &scene, const Vec3 &tx, const CarrierConfig &carrier, const TraceLimits &limits,
                 ScatterPolicy scatter_policy, const AntennaConfig &tx_antenna = {}, const AntennaConfig &rx_antenna = {},
                 double facet_size = 0.0);

    std::vector<RayPath> specular(const Vec3 &rx) const { return tracer_.trace(rx); }
    std::vector<RayPath> scatter(const Vec3 &rx) const { return scatter_.paths(tx_, rx); }

    const Scene &scene() const { return scene_; }
    const Vec3 &tx() const { return tx_; }
    const CarrierConfig &carrier() const { return carrier_; }
    ScatterPolicy scatter_policy() const { return policy_; }

  private:
    const Scene &scene_;
    Vec3 tx_;
    CarrierConfig carrier_;
    ScatterPolicy policy_;
    SpecularTracer tracer_;
    ScatterEngine scatter_;
};

// Doppler of a path whose only moving vertex is the receiver: -(f/c) u_last . v_rx.
double stationary_doppler(const RayPath &path, const Vec3 &rx_velocity, const CarrierConfig &carrier);

struct Keyframe
{
    std::size_t index = 0;
    std::int64_t step = 0; // update-step index
    double time = 0.0;
    Vec3 rx;
    std::vector<RayPath> paths;
};

// Uniform time grid: t_n = n * step, n = 0..count-1, with duration an integer number of steps.
struct TimeGrid
{
    double step = 0.01;
    std::int64_t steps = 0; // number of update steps; snapshots = steps + 1

    static TimeGrid make(double duration, double step);
    double time(std::int64_t n) const { return static_cast<double>(n) * step; }
    // Integer ratio kf_interval / step, validated.
    std::int64_t ratio(double interval) const;
};

// Keyframe steps 0, K, 2K, ... plus the final step.
std::vector<std::int64_t> keyframe_steps(std::int64_t steps, std::int64_t ratio);

std::vector<Keyframe> compute_keyframes(const ChannelModel &model, const Trajectory &trajectory, const TimeGrid &grid,
                                        std::int64_t ratio, bool include_scatter = false);

struct PathMatch
{
    std::vector<std::pair<std::size_t, std::size_t>> matched; // (index in a, index in b)
    std::vector<std::size_t> births;                          // indices in b
    std::vector<std::size_t> deaths;                          // indices in a
};

PathMatch match_paths(const Keyframe &a, const Keyframe &b);

enum class LifeState
{
    Tracked, // present in both bracketing keyframes
    Born,    // present only in the right keyframe
    Dying,   // present only in the left keyframe
};

// One path between two consecutive keyframes.
struct TrackedPath
{
    Signature signature;
    LifeState state = LifeState::Tracked;
    const RayPath *left = nullptr;  // null for Born
    const RayPath *right = nullptr; // null for Dying
    double t_left = 0.0, t_right = 0.0;
    double ramp_start = 0.0, ramp_end = 0.0; // magnitude ramp for Born / Dying
};

// Magnitude factor in [0, 1] of a tracked path at time t (1 for Tracked paths).
double ramp_gain(const TrackedPath &p, double t);

// Interpolated path at time t strictly inside [t_left, t_right]. Throws std::domain_error when
// t is outside the path's live interval.
RayPath interpolate_path(const TrackedPath &p, double t, const Vec3 &rx, const Vec3 &rx_velocity, const CarrierConfig &carrier);

// Seeded uniform source for birth/death instants: 53-bit doubles in [0, 1) from mt19937_64.
class RampGenerator
{
  public:
    explicit RampGenerator(std::uint64_t seed) : engine_(seed) {}

    // Independent stream for the keyframe interval ending at keyframe `index`, so a windowed run
    // draws the same ramps as the full run.
    static RampGenerator for_interval(std::uint64_t seed, std::uint64_t index);
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 engine_;
};

// Draws activation instants for Born paths and extinction instants for Dying paths, in the
// order they appear in `paths`. The ramp lasts ramp_fraction of the keyframe interval.
void apply_birth_death(std::vector<TrackedPath> &paths, double ramp_fraction, std::function<double()> uniform);

struct ChannelSnapshot
{
    std::int64_t step = 0;
    double time = 0.0;
    Vec3 rx;
    std::vector<RayPath> paths;
    std::vector<std::uint64_t> path_ids; // stable per signature over the stream
    bool keyframe = false;
};

struct StreamOptions
{
    double update_step = 0.01;
    double kf_interval = 0.01;
    double ramp_fraction = 0.5;
    std::uint64_t seed = 1;
    bool interpolate_scatter = false;
    // Scatter paths are evaluated only for timestamps inside this window (all when unset).
    std::optional<std::pair<double, double>> scatter_window;
    // Only snapshots inside this window are produced (all when unset).
    std::optional<std::pair<double, double>> output_window;
    std::size_t keyframe_block = 64;
};

struct StreamStats
{
    std::size_t snapshots = 0;
    std::size_t rt_invocations = 0;      // exact specular traces (keyframes)
    std::size_t scatter_invocations = 0; // exact scatter evaluations per snapshot
    double keyframe_seconds = 0.0;
    double interpolation_seconds = 0.0;
    double scatter_seconds = 0.0;
};

using SnapshotSink = std::function<void(const ChannelSnapshot &)>;

// Produces one snapshot per update step, in time order, passing each to `sink`.
StreamStats stream_snapshots(const ChannelModel &model, const Trajectory &trajectory, const StreamOptions &options,
                             const SnapshotSink &sink);

} // namespace railchan

#endif
