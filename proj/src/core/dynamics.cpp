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

#include "railchan/dynamics.hpp"
#include "railchan/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace railchan
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

bool in_window(const std::optional<std::pair<double, double>> &w, double t)
{
    return !w || (t >= w->first - 1e-12 && t <= w->second + 1e-12);
}

// -(f/c) dL/dt for a polyline whose vertices move with the given velocities.
double polyline_doppler(const std::vector<Vec3> &v, const std::vector<Vec3> &w, const CarrierConfig &carrier)
{
    double rate = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
    {
        const Vec3 d = v[i + 1] - v[i];
        const double len = norm(d);
        if (len > 0.0)
            rate += dot(d / len, w[i + 1] - w[i]);
    }
    return -carrier.frequency / kSpeedOfLight * rate;
}

cdouble carry_phase(cdouble anchor, double magnitude, double tau, double tau_anchor, const CarrierConfig &carrier)
{
    return std::polar(magnitude, std::arg(anchor) - 2.0 * kPi * carrier.frequency * (tau - tau_anchor));
}

struct SortKey
{
    Signature signature;
    std::size_t index;
};

} // namespace

Trajectory::Trajectory(std::vector<Vec3> waypoints, double speed, double duration)
    : waypoints_(std::move(waypoints)), speed_(speed), duration_(duration)
{
    if (waypoints_.size() < 2)
        throw std::invalid_argument("trajectory: at least two waypoints are required");
    if (!(speed_ > 0.0) || !std::isfinite(speed_))
        throw std::invalid_argument("trajectory: speed must be positive");
    if (!(duration_ > 0.0) || !std::isfinite(duration_))
        throw std::invalid_argument("trajectory: duration must be positive");
    cumulative_.push_back(0.0);
    for (std::size_t i = 0; i + 1 < waypoints_.size(); ++i)
    {
        if (!is_finite(waypoints_[i]) || !is_finite(waypoints_[i + 1]))
            throw std::invalid_argument("trajectory: non-finite waypoint");
        const double d = distance(waypoints_[i], waypoints_[i + 1]);
        if (d <= kEpsGeom)
            throw std::invalid_argument("trajectory: repeated waypoint " + std::to_string(i + 1));
        cumulative_.push_back(cumulative_.back() + d);
    }
    if (speed_ * duration_ > length() + 1e-6)
        throw std::invalid_argument("trajectory: speed x duration (" + std::to_string(speed_ * duration_) +
                                    " m) exceeds the path length (" + std::to_string(length()) + " m)");
}

std::size_t Trajectory::segment_at(double s) const
{
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t idx = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    return std::min(idx, waypoints_.size() - 2);
}

Vec3 Trajectory::position(double t) const
{
    if (!(t >= 0.0) || t > duration_ * (1.0 + 1e-12) + 1e-12)
        throw std::domain_error("trajectory: time " + std::to_string(t) + " s outside [0, duration]");
    const double s = std::min(speed_ * t, length());
    const std::size_t i = segment_at(s);
    const double seg = cumulative_[i + 1] - cumulative_[i];
    return lerp(waypoints_[i], waypoints_[i + 1], (s - cumulative_[i]) / seg);
}

Vec3 Trajectory::velocity(double t) const
{
    if (!(t >= 0.0) || t > duration_ * (1.0 + 1e-12) + 1e-12)
        throw std::domain_error("trajectory: time outside [0, duration]");
    const std::size_t i = segment_at(std::min(speed_ * t, length()));
    return normalized(waypoints_[i + 1] - waypoints_[i]) * speed_;
}

ChannelModel::ChannelModel(const Scene &scene, const Vec3 &tx, const CarrierConfig &carrier, const TraceLimits &limits,
                           ScatterPolicy scatter_policy, const AntennaConfig &tx_antenna, const AntennaConfig &rx_antenna,
                           double facet_size)
    : scene_(scene), tx_(tx), carrier_(carrier), policy_(scatter_policy), tracer_(scene, tx, carrier, limits, tx_antenna, rx_antenna),
      scatter_(scene, carrier, scatter_policy, facet_size, tx_antenna, rx_antenna)
{
}

double stationary_doppler(const RayPath &path, const Vec3 &rx_velocity, const CarrierConfig &carrier)
{
    const std::size_t n = path.vertices.size();
    if (n < 2)
        return 0.0;
    const Vec3 u = normalized(path.vertices[n - 1] - path.vertices[n - 2]);
    return -carrier.frequency / kSpeedOfLight * dot(u, rx_velocity);
}

TimeGrid TimeGrid::make(double duration, double step)
{
    if (!(step > 0.0) || !std::isfinite(step))
        throw std::invalid_argument("update step must be positive");
    if (!(duration > 0.0))
        throw std::invalid_argument("duration must be positive");
    const double n = std::round(duration / step);
    if (std::abs(n * step - duration) > 1e-9 * std::max(1.0, duration))
        throw std::invalid_argument("duration is not an integer number of update steps");
    return {step, static_cast<std::int64_t>(n)};
}

std::int64_t TimeGrid::ratio(double interval) const
{
    const double r = std::round(interval / step);
    if (r < 1.0 || std::abs(r * step - interval) > 1e-9 * std::max(interval, step))
        throw std::invalid_argument("keyframe interval " + std::to_string(interval) + " s is not a positive integer multiple of the update step");
    return static_cast<std::int64_t>(r);
}

std::vector<std::int64_t> keyframe_steps(std::int64_t steps, std::int64_t ratio)
{
    if (ratio < 1 || steps < 0)
        throw std::invalid_argument("keyframe_steps: invalid arguments");
    std::vector<std::int64_t> out;
    for (std::int64_t s = 0; s < steps; s += ratio)
        out.push_back(s);
    out.push_back(steps);
    return out;
}

std::vector<Keyframe> compute_keyframes(const ChannelModel &model, const Trajectory &trajectory, const TimeGrid &grid,
                                        std::int64_t ratio, bool include_scatter)
{
    const auto steps = keyframe_steps(grid.steps, ratio);
    std::vector<Keyframe> out(steps.size());
    parallel_for(steps.size(), [&](std::size_t i) {
        Keyframe &kf = out[i];
        kf.index = i;
        kf.step = steps[i];
        kf.time = grid.time(kf.step);
        kf.rx = trajectory.position(kf.time);
        kf.paths = model.specular(kf.rx);
        if (include_scatter)
        {
            auto s = model.scatter(kf.rx);
            kf.paths.insert(kf.paths.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
        }
        const Vec3 vel = trajectory.velocity(kf.time);
        for (auto &p : kf.paths)
            p.doppler_hz = stationary_doppler(p, vel, model.carrier());
    });
    return out;
}

PathMatch match_paths(const Keyframe &a, const Keyframe &b)
{
    std::map<Signature, std::vector<std::size_t>> in_b;
    for (std::size_t j = b.paths.size(); j-- > 0;)
        in_b[b.paths[j].signature()].push_back(j);
    std::vector<bool> used(b.paths.size(), false);
    PathMatch m;
    for (std::size_t i = 0; i < a.paths.size(); ++i)
    {
        auto it = in_b.find(a.paths[i].signature());
        if (it == in_b.end() || it->second.empty())
        {
            m.deaths.push_back(i);
            continue;
        }
        const std::size_t j = it->second.back();
        it->second.pop_back();
        used[j] = true;
        m.matched.emplace_back(i, j);
    }
    for (std::size_t j = 0; j < b.paths.size(); ++j)
        if (!used[j])
            m.births.push_back(j);
    return m;
}

double ramp_gain(const TrackedPath &p, double t)
{
    switch (p.state)
    {
    case LifeState::Tracked:
        return 1.0;
    case LifeState::Born:
        if (p.ramp_end <= p.ramp_start)
            return t >= p.ramp_start ? 1.0 : 0.0;
        return std::clamp((t - p.ramp_start) / (p.ramp_end - p.ramp_start), 0.0, 1.0);
    case LifeState::Dying:
        if (p.ramp_end <= p.ramp_start)
            return t < p.ramp_end ? 1.0 : 0.0;
        return std::clamp((p.ramp_end - t) / (p.ramp_end - p.ramp_start), 0.0, 1.0);
    }
    return 0.0;
}

RayPath interpolate_path(const TrackedPath &p, double t, const Vec3 &rx, const Vec3 &rx_velocity, const CarrierConfig &carrier)
{
    if (t < p.t_left || t > p.t_right)
        throw std::domain_error("interpolate_path: time outside the keyframe interval");
    if ((p.state == LifeState::Born && t < p.ramp_start) || (p.state == LifeState::Dying && t >= p.ramp_end))
        throw std::domain_error("interpolate_path: time outside the live interval");

    const RayPath &base = p.state == LifeState::Born ? *p.right : *p.left;
    RayPath out;
    out.tag = base.tag;
    out.interactions = base.interactions;
    out.vertices = base.vertices;
    out.vertices.back() = rx;
    std::vector<Vec3> w(out.vertices.size());
    w.back() = rx_velocity;

    const double gain = ramp_gain(p, t);
    if (p.state == LifeState::Tracked)
    {
        const RayPath &r = *p.right;
        const double span = p.t_right - p.t_left;
        const double alpha = (t - p.t_left) / span;
        for (std::size_t i = 1; i + 1 < out.vertices.size(); ++i)
        {
            out.vertices[i] = lerp(base.vertices[i], r.vertices[i], alpha);
            out.interactions[i - 1].point = out.vertices[i];
            w[i] = (r.vertices[i] - base.vertices[i]) / span;
        }
        update_path_geometry(out);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
            {
                const double mag = (1.0 - alpha) * std::abs(base.transfer.m[a][b]) + alpha * std::abs(r.transfer.m[a][b]);
                out.transfer.m[a][b] = carry_phase(base.transfer.m[a][b], mag, out.delay, base.delay, carrier);
            }
    }
    else
    {
        update_path_geometry(out);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                out.transfer.m[a][b] = carry_phase(base.transfer.m[a][b], gain * std::abs(base.transfer.m[a][b]), out.delay, base.delay, carrier);
    }
    out.doppler_hz = polyline_doppler(out.vertices, w, carrier);
    return out;
}

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

RampGenerator RampGenerator::for_interval(std::uint64_t seed, std::uint64_t index)
{
    return RampGenerator(splitmix64(seed ^ splitmix64(index)));
}

void apply_birth_death(std::vector<TrackedPath> &paths, double ramp_fraction, std::function<double()> uniform)
{
    if (ramp_fraction < 0.0 || ramp_fraction > 1.0)
        throw std::invalid_argument("ramp fraction must lie in [0, 1]");
    for (auto &p : paths)
    {
        const double span = p.t_right - p.t_left;
        const double ramp = ramp_fraction * span;
        if (p.state == LifeState::Born)
        {
            p.ramp_start = p.t_left + uniform() * (span - ramp);
            p.ramp_end = std::min(p.ramp_start + ramp, p.t_right);
        }
        else if (p.state == LifeState::Dying)
        {
            p.ramp_end = p.t_left + ramp + uniform() * (span - ramp);
            p.ramp_start = std::max(p.ramp_end - ramp, p.t_left);
        }
    }
}

StreamStats stream_snapshots(const ChannelModel &model, const Trajectory &trajectory, const StreamOptions &options,
                             const SnapshotSink &sink)
{
    const TimeGrid grid = TimeGrid::make(trajectory.duration(), options.update_step);
    const std::int64_t ratio = grid.ratio(options.kf_interval);
    if (options.ramp_fraction < 0.0 || options.ramp_fraction > 1.0)
        throw std::invalid_argument("ramp fraction must lie in [0, 1]");
    const auto kf_steps = keyframe_steps(grid.steps, ratio);
    const CarrierConfig &carrier = model.carrier();
    const bool scatter_on = model.scatter_policy() != ScatterPolicy::Off;
    const bool scatter_exact = scatter_on && !options.interpolate_scatter;

    std::int64_t n0 = 0, n1 = grid.steps;
    if (options.output_window)
    {
        n0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(options.output_window->first / grid.step - 1e-9)));
        n1 = std::min<std::int64_t>(grid.steps, static_cast<std::int64_t>(std::floor(options.output_window->second / grid.step + 1e-9)));
    }
    StreamStats stats;
    if (n0 > n1)
        return stats;

    // Keyframe index range bracketing the output steps.
    std::size_t ka = 0, kb = kf_steps.size() - 1;
    while (ka + 1 < kf_steps.size() && kf_steps[ka + 1] <= n0)
        ++ka;
    while (kb > 0 && kf_steps[kb - 1] >= n1)
        --kb;

    std::map<Signature, std::uint64_t> ids;
    const auto emit = [&](ChannelSnapshot &snap) {
        std::vector<SortKey> keys;
        keys.reserve(snap.paths.size());
        for (std::size_t i = 0; i < snap.paths.size(); ++i)
            keys.push_back({snap.paths[i].signature(), i});
        std::stable_sort(keys.begin(), keys.end(), [](const SortKey &a, const SortKey &b) { return a.signature < b.signature; });
        std::vector<RayPath> sorted;
        sorted.reserve(keys.size());
        snap.path_ids.clear();
        for (auto &k : keys)
        {
            sorted.push_back(std::move(snap.paths[k.index]));
            const auto [it, inserted] = ids.try_emplace(k.signature, ids.size());
            snap.path_ids.push_back(it->second);
        }
        snap.paths = std::move(sorted);
        ++stats.snapshots;
        sink(snap);
    };

    const bool scatter_in_kf = scatter_on && options.interpolate_scatter;
    const auto trace_keyframe = [&](std::size_t k) {
        Keyframe kf;
        kf.index = k;
        kf.step = kf_steps[k];
        kf.time = grid.time(kf.step);
        kf.rx = trajectory.position(kf.time);
        kf.paths = model.specular(kf.rx);
        if (scatter_in_kf && in_window(options.scatter_window, kf.time))
        {
            auto s = model.scatter(kf.rx);
            kf.paths.insert(kf.paths.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
        }
        const Vec3 vel = trajectory.velocity(kf.time);
        for (auto &p : kf.paths)
            p.doppler_hz = stationary_doppler(p, vel, carrier);
        return kf;
    };

    std::optional<Keyframe> prev;
    const std::size_t block = std::max<std::size_t>(1, options.keyframe_block);
    for (std::size_t first = ka; first <= kb; first += block)
    {
        const std::size_t last = std::min(kb, first + block - 1);
        std::vector<Keyframe> kfs(last - first + 1);
        auto start = Clock::now();
        parallel_for(kfs.size(), [&](std::size_t i) { kfs[i] = trace_keyframe(first + i); });
        stats.keyframe_seconds += seconds_since(start);
        stats.rt_invocations += kfs.size();

        // Exact scatter paths for every emitted step of this block.
        std::map<std::int64_t, std::vector<RayPath>> scatter;
        if (scatter_exact)
        {
            std::vector<std::int64_t> wanted;
            const std::int64_t lo = std::max(n0, prev ? prev->step + 1 : kfs.front().step);
            const std::int64_t hi = std::min(n1, kfs.back().step);
            for (std::int64_t n = lo; n <= hi; ++n)
                if (in_window(options.scatter_window, grid.time(n)))
                    wanted.push_back(n);
            std::vector<std::vector<RayPath>> results(wanted.size());
            start = Clock::now();
            parallel_for(wanted.size(), [&](std::size_t i) {
                const double t = grid.time(wanted[i]);
                results[i] = model.scatter(trajectory.position(t));
                const Vec3 vel = trajectory.velocity(t);
                for (auto &p : results[i])
                    p.doppler_hz = stationary_doppler(p, vel, carrier);
            });
            stats.scatter_seconds += seconds_since(start);
            stats.scatter_invocations += wanted.size();
            for (std::size_t i = 0; i < wanted.size(); ++i)
                scatter.emplace(wanted[i], std::move(results[i]));
        }
        const auto add_scatter = [&](ChannelSnapshot &snap) {
            auto it = scatter.find(snap.step);
            if (it != scatter.end())
                snap.paths.insert(snap.paths.end(), it->second.begin(), it->second.end());
        };

        for (Keyframe &cur : kfs)
        {
            start = Clock::now();
            if (prev)
            {
                const PathMatch m = match_paths(*prev, cur);
                std::vector<TrackedPath> tracked;
                tracked.reserve(m.matched.size() + m.births.size() + m.deaths.size());
                for (const auto &[i, j] : m.matched)
                    tracked.push_back({prev->paths[i].signature(), LifeState::Tracked, &prev->paths[i], &cur.paths[j], prev->time, cur.time});
                std::vector<TrackedPath> changes;
                for (std::size_t j : m.births)
                    changes.push_back({cur.paths[j].signature(), LifeState::Born, nullptr, &cur.paths[j], prev->time, cur.time});
                for (std::size_t i : m.deaths)
                    changes.push_back({prev->paths[i].signature(), LifeState::Dying, &prev->paths[i], nullptr, prev->time, cur.time});
                std::stable_sort(changes.begin(), changes.end(), [](const TrackedPath &a, const TrackedPath &b) {
                    return a.signature != b.signature ? a.signature < b.signature : a.state < b.state;
                });
                RampGenerator rng = RampGenerator::for_interval(options.seed, cur.index);
                apply_birth_death(changes, options.ramp_fraction, [&] { return rng.uniform(); });
                tracked.insert(tracked.end(), changes.begin(), changes.end());

                for (std::int64_t n = std::max(prev->step + 1, n0); n < cur.step && n <= n1; ++n)
                {
                    ChannelSnapshot snap;
                    snap.step = n;
                    snap.time = grid.time(n);
                    snap.rx = trajectory.position(snap.time);
                    const Vec3 vel = trajectory.velocity(snap.time);
                    for (const TrackedPath &tp : tracked)
                    {
                        if (ramp_gain(tp, snap.time) <= 0.0)
                            continue;
                        snap.paths.push_back(interpolate_path(tp, snap.time, snap.rx, vel, carrier));
                    }
                    add_scatter(snap);
                    stats.interpolation_seconds += seconds_since(start);
                    emit(snap);
                    start = Clock::now();
                }
            }
            if (cur.step >= n0 && cur.step <= n1)
            {
                ChannelSnapshot snap;
                snap.step = cur.step;
                snap.time = cur.time;
                snap.rx = cur.rx;
                snap.paths = cur.paths;
                snap.keyframe = true;
                add_scatter(snap);
                stats.interpolation_seconds += seconds_since(start);
                emit(snap);
            }
            else
                stats.interpolation_seconds += seconds_since(start);
            prev = std::move(cur);
        }
    }
    return stats;
}

} // namespace railchan
