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

#ifndef RAILCHAN_DRIVERS_HPP
#define RAILCHAN_DRIVERS_HPP

#include "railchan/csv.hpp"
#include "railchan/metrics.hpp"
#include "railchan/scenario.hpp"

#include <string>
#include <vector>

namespace railchan
{

const char *version();

struct OutputFile
{
    std::string path;
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct SimulationResult
{
    StreamStats stats;
    std::vector<SnapshotMetrics> metrics;
    double metrics_seconds = 0.0;
    double wall_seconds = 0.0;
};

// Streams snapshots and computes per-snapshot metrics; `extra` sees every snapshot as well.
SimulationResult simulate(const ChannelModel &model, const Trajectory &trajectory, const StreamOptions &options, double tx_power_dbm,
                          const SnapshotSink &extra = {});

// Scene named by the configuration (ConfigError when none is given).
Scene load_config_scene(const ScenarioConfig &config);

ChannelModel make_channel_model(const Scene &scene, const ScenarioConfig &config, ScatterPolicy policy);

struct RunSummary
{
    bool exact = false;
    double kf_interval_s = 0.0;
    SimulationResult result;
    std::vector<OutputFile> files;
    std::string manifest;
};

// Full snapshot stream in exact (every update step traced) or keyframed mode.
RunSummary cmd_run(const ScenarioConfig &config, bool exact);

struct SweepRow
{
    double interval_s = 0.0;
    std::size_t rt_invocations = 0;
    double keyframe_seconds = 0.0;
    double total_seconds = 0.0;
    double normalized_rt_time = 0.0;
    double normalized_total_time = 0.0;
    ErrorReport report;
};

struct SweepSummary
{
    SimulationResult reference;
    std::vector<SweepRow> rows;
    std::vector<OutputFile> files;
    std::string manifest;
};

SweepSummary cmd_sweep(const ScenarioConfig &config);

struct ScatterStudySummary
{
    std::size_t snapshots = 0;
    std::size_t cir_snapshots = 0;
    PowerDecomposition power;
    double delay_spread_with_s = kUndefined;
    double delay_spread_without_s = kUndefined;
    double mean_scatter_paths = 0.0;
    std::vector<OutputFile> files;
    std::string manifest;
};

ScatterStudySummary cmd_scatter_study(const ScenarioConfig &config);

struct BenchStage
{
    std::string mode;  // exact | interpolated
    std::string stage; // keyframe_rt | interpolation | scatter | metrics | total
    std::vector<double> samples;
    double min = 0.0;
    double median = 0.0;
};

struct BenchSummary
{
    std::vector<BenchStage> stages;
    std::size_t rt_exact = 0;
    std::size_t rt_interpolated = 0;
    double speedup = 0.0; // median total exact / median total interpolated
    std::vector<OutputFile> files;
    std::string manifest;
};

BenchSummary cmd_bench(const ScenarioConfig &config);

struct SceneSummary
{
    std::size_t buildings = 0;
    std::size_t facades = 0;
    std::size_t vertical_edges = 0;
    std::size_t convex_edges = 0;
    std::size_t scatterers = 0;
    std::size_t grid_cells = 0;
};

SceneSummary summarize_scene(const Scene &scene);

} // namespace railchan

#endif
