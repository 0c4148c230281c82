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

#include "railchan/drivers.hpp"
#include "railchan/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace railchan
{

namespace
{

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path prepare_output_dir(const ScenarioConfig &config)
{
    if (config.output_dir.empty())
        throw ConfigError("output_dir must not be empty");
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
    return dir;
}

OutputFile describe(const fs::path &path)
{
    OutputFile f;
    f.path = path.filename().string();
    f.bytes = fs::file_size(path);
    f.sha256 = sha256_file(path.string());
    return f;
}

json stats_json(const StreamStats &s)
{
    return json{{"snapshots", s.snapshots},
                {"rt_invocations", s.rt_invocations},
                {"scatter_invocations", s.scatter_invocations},
                {"keyframe_seconds", s.keyframe_seconds},
                {"interpolation_seconds", s.interpolation_seconds},
                {"scatter_seconds", s.scatter_seconds}};
}

std::string write_manifest(const fs::path &dir, const ScenarioConfig &config, const std::string &command, json details,
                           const std::vector<OutputFile> &files)
{
    json m;
    m["command"] = command;
    m["version"] = version();
    m["seed"] = config.seed;
    m["threads"] = thread_count();
    m["config"] = json::parse(config_to_json(config));
    m["details"] = std::move(details);
    json list = json::array();
    for (const auto &f : files)
        list.push_back(json{{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    m["files"] = std::move(list);

    const fs::path path = dir / "manifest.json";
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << m.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
    return path.string();
}

void write_metrics_file(const fs::path &path, std::span<const SnapshotMetrics> metrics)
{
    CsvWriter w(path.string());
    write_metrics_header(w);
    for (const auto &m : metrics)
        write_metrics_row(w, m);
    w.close();
}

double median(std::vector<double> v)
{
    return quantile(std::move(v), 0.5);
}

} // namespace

const char *version()
{
    return RAILCHAN_VERSION;
}

SimulationResult simulate(const ChannelModel &model, const Trajectory &trajectory, const StreamOptions &options, double tx_power_dbm,
                          const SnapshotSink &extra)
{
    SimulationResult r;
    const auto t0 = Clock::now();
    r.stats = stream_snapshots(model, trajectory, options, [&](const ChannelSnapshot &s) {
        const auto tm = Clock::now();
        r.metrics.push_back(compute_metrics(s.time, s.paths, tx_power_dbm));
        r.metrics_seconds += seconds_since(tm);
        if (extra)
            extra(s);
    });
    r.wall_seconds = seconds_since(t0);
    return r;
}

Scene load_config_scene(const ScenarioConfig &config)
{
    if (config.scene_path.empty())
        throw ConfigError("no scene given (set 'scene' in the config or pass --scene)");
    return load_scene_file(config.scene_path);
}

ChannelModel make_channel_model(const Scene &scene, const ScenarioConfig &config, ScatterPolicy policy)
{
    return ChannelModel(scene, config.tx_position, config.carrier(), config.limits, policy, config.tx_antenna(), config.rx_antenna(),
                        config.facet_size());
}

RunSummary cmd_run(const ScenarioConfig &config, bool exact)
{
    const Scene scene = load_config_scene(config);
    const ChannelModel model = make_channel_model(scene, config, config.scatter_policy);
    const fs::path dir = prepare_output_dir(config);

    RunSummary summary;
    summary.exact = exact;
    summary.kf_interval_s = exact ? config.update_step_s : config.kf_interval_s;
    const StreamOptions options = config.stream_options(summary.kf_interval_s);

    const fs::path trace_path = dir / "trace.csv";
    std::optional<CsvWriter> trace;
    if (config.write_trace)
    {
        trace.emplace(trace_path.string());
        trace->header(trace_columns());
    }
    summary.result = simulate(model, config.trajectory(), options, config.tx_power_dbm, [&](const ChannelSnapshot &s) {
        if (trace)
            write_trace_rows(*trace, s);
    });
    if (trace)
    {
        trace->close();
        summary.files.push_back(describe(trace_path));
    }

    const fs::path metrics_path = dir / "metrics.csv";
    write_metrics_file(metrics_path, summary.result.metrics);
    summary.files.push_back(describe(metrics_path));

    json details{{"mode", exact ? "exact" : "interpolated"},
                 {"kf_interval_s", summary.kf_interval_s},
                 {"stats", stats_json(summary.result.stats)},
                 {"timings_s", {{"metrics", summary.result.metrics_seconds}, {"total", summary.result.wall_seconds}}}};
    summary.manifest = write_manifest(dir, config, "run", std::move(details), summary.files);
    return summary;
}

SweepSummary cmd_sweep(const ScenarioConfig &config)
{
    if (config.sweep_intervals_s.empty())
        throw ConfigError("sweep_intervals_s must not be empty");
    const Scene scene = load_config_scene(config);
    const ChannelModel model = make_channel_model(scene, config, config.scatter_policy);
    const fs::path dir = prepare_output_dir(config);
    const Trajectory trajectory = config.trajectory();

    // Validate all intervals before the expensive reference run.
    const TimeGrid grid = TimeGrid::make(config.duration_s, config.update_step_s);
    for (double k : config.sweep_intervals_s)
    {
        try
        {
            (void)grid.ratio(k);
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(std::string("sweep_intervals_s: ") + e.what());
        }
    }

    SweepSummary summary;
    summary.reference = simulate(model, trajectory, config.stream_options(config.update_step_s), config.tx_power_dbm);
    const double ref_rt = summary.reference.stats.keyframe_seconds;
    const double ref_total = summary.reference.wall_seconds;

    for (double k : config.sweep_intervals_s)
    {
        const SimulationResult r = simulate(model, trajectory, config.stream_options(k), config.tx_power_dbm);
        SweepRow row;
        row.interval_s = k;
        row.rt_invocations = r.stats.rt_invocations;
        row.keyframe_seconds = r.stats.keyframe_seconds;
        row.total_seconds = r.wall_seconds;
        row.normalized_rt_time = ref_rt > 0.0 ? r.stats.keyframe_seconds / ref_rt : kUndefined;
        row.normalized_total_time = ref_total > 0.0 ? r.wall_seconds / ref_total : kUndefined;
        row.report = compare_streams(summary.reference.metrics, r.metrics);
        row.report.reference_seconds = ref_total;
        row.report.test_seconds = r.wall_seconds;
        row.report.normalized_time = row.normalized_total_time;
        summary.rows.push_back(std::move(row));
    }

    const fs::path ref_path = dir / "reference_metrics.csv";
    write_metrics_file(ref_path, summary.reference.metrics);
    summary.files.push_back(describe(ref_path));

    const fs::path nrmse_path = dir / "sweep_nrmse.csv";
    {
        CsvWriter w(nrmse_path.string());
        std::vector<std::string> cols{"metric", "unit", "q10", "q90", "degenerate"};
        for (const auto &row : summary.rows)
            cols.push_back("nrmse_" + format_double(row.interval_s));
        w.header(cols);
        for (std::size_t m = 0; m < kMetricCount; ++m)
        {
            const MetricError &first = summary.rows.front().report.metrics[m];
            w.field(first.name).field(first.unit).field(first.q10).field(first.q90).field(first.degenerate ? "1" : "0");
            for (const auto &row : summary.rows)
                w.field(row.report.metrics[m].nrmse);
            w.end_row();
        }
        w.close();
    }
    summary.files.push_back(describe(nrmse_path));

    const fs::path errors_path = dir / "sweep_errors.csv";
    {
        CsvWriter w(errors_path.string());
        w.header({"interval_s", "metric", "unit", "samples", "rmse", "q10", "q90", "nrmse", "degenerate"});
        for (const auto &row : summary.rows)
            for (const auto &e : row.report.metrics)
            {
                w.field(row.interval_s).field(e.name).field(e.unit).field(static_cast<std::uint64_t>(e.samples));
                w.field(e.rmse).field(e.q10).field(e.q90).field(e.nrmse).field(e.degenerate ? "1" : "0");
                w.end_row();
            }
        w.close();
    }
    summary.files.push_back(describe(errors_path));

    const fs::path cdf_path = dir / "sweep_cdf.csv";
    {
        CsvWriter w(cdf_path.string());
        w.header({"interval_s", "metric", "unit", "level", "abs_error"});
        for (const auto &row : summary.rows)
            for (const auto &e : row.report.metrics)
                for (std::size_t i = 0; i < kCdfLevels.size(); ++i)
                {
                    w.field(row.interval_s).field(e.name).field(e.unit).field(kCdfLevels[i]).field(e.cdf[i]);
                    w.end_row();
                }
        w.close();
    }
    summary.files.push_back(describe(cdf_path));

    const fs::path timing_path = dir / "sweep_timing.csv";
    {
        CsvWriter w(timing_path.string());
        w.header({"interval_s", "rt_invocations", "keyframe_seconds", "total_seconds", "normalized_rt_time", "normalized_total_time"});
        w.field(config.update_step_s).field(static_cast<std::uint64_t>(summary.reference.stats.rt_invocations)).field(ref_rt);
        w.field(ref_total).field(1.0).field(1.0);
        w.end_row();
        for (const auto &row : summary.rows)
        {
            w.field(row.interval_s).field(static_cast<std::uint64_t>(row.rt_invocations)).field(row.keyframe_seconds);
            w.field(row.total_seconds).field(row.normalized_rt_time).field(row.normalized_total_time);
            w.end_row();
        }
        w.close();
    }
    summary.files.push_back(describe(timing_path));

    json details{{"reference", stats_json(summary.reference.stats)}, {"intervals_s", config.sweep_intervals_s}};
    summary.manifest = write_manifest(dir, config, "sweep", std::move(details), summary.files);
    return summary;
}

ScatterStudySummary cmd_scatter_study(const ScenarioConfig &config)
{
    const Scene scene = load_config_scene(config);
    if (scene.scatterers().empty())
        throw ConfigError("scene '" + config.scene_path + "' has no scatterers");
    const ChannelModel model = make_channel_model(scene, config, config.scatter_policy);
    const fs::path dir = prepare_output_dir(config);

    StreamOptions options = config.stream_options(config.kf_interval_s);
    auto window = config.scatter_window_s.value_or(std::pair{0.0, config.duration_s});
    window.second = std::min(window.second, config.duration_s);
    if (!(window.first < window.second))
        throw ConfigError("scatter window lies outside the trajectory duration");
    options.output_window = window;

    const TimeGrid grid = TimeGrid::make(config.duration_s, config.update_step_s);
    std::int64_t cir_ratio = 0;
    try
    {
        cir_ratio = grid.ratio(config.cir_time_step_s);
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(std::string("cir.time_step_s: ") + e.what());
    }

    std::vector<ChannelSnapshot> snapshots;
    const SimulationResult sim = simulate(model, config.trajectory(), options, config.tx_power_dbm,
                                          [&](const ChannelSnapshot &s) { snapshots.push_back(s); });

    ScatterStudySummary summary;
    summary.snapshots = snapshots.size();
    summary.power = power_decomposition(snapshots, config.cir_pol, config.tx_power_dbm);

    double with_sum = 0.0, without_sum = 0.0, scatter_paths = 0.0;
    std::size_t with_n = 0, without_n = 0;
    std::vector<ChannelSnapshot> cir_snapshots;
    for (const auto &s : snapshots)
    {
        const double with = delay_stats(s.paths).spread;
        std::vector<RayPath> specular;
        for (const auto &p : s.paths)
        {
            if (p.tag == PathTag::Specular)
                specular.push_back(p);
            else
                scatter_paths += 1.0;
        }
        const double without = delay_stats(specular).spread;
        if (std::isfinite(with))
        {
            with_sum += with;
            ++with_n;
        }
        if (std::isfinite(without))
        {
            without_sum += without;
            ++without_n;
        }
        if (s.step % cir_ratio == 0)
            cir_snapshots.push_back(s);
    }
    summary.delay_spread_with_s = with_n ? with_sum / static_cast<double>(with_n) : kUndefined;
    summary.delay_spread_without_s = without_n ? without_sum / static_cast<double>(without_n) : kUndefined;
    summary.mean_scatter_paths = snapshots.empty() ? 0.0 : scatter_paths / static_cast<double>(snapshots.size());
    summary.cir_snapshots = cir_snapshots.size();

    CirOptions cir;
    cir.bandwidth = config.cir_bandwidth_hz;
    cir.rolloff = config.cir_rolloff;
    cir.resolution = config.cir_resolution_s;
    cir.pol = config.cir_pol;
    const TVCir total = synthesize_tv_cir(cir_snapshots, cir);
    // Shared delay grid so both files line up row by row.
    cir.max_delay = total.delays.empty() ? 0.0 : total.delays.back();
    const TVCir scatter_only = synthesize_tv_cir(cir_snapshots, cir, [](const RayPath &p) { return p.tag == PathTag::Scatter; });

    const fs::path total_path = dir / "tvcir_total.csv";
    write_tv_cir(total_path.string(), total);
    summary.files.push_back(describe(total_path));
    const fs::path scatter_path = dir / "tvcir_scatter.csv";
    write_tv_cir(scatter_path.string(), scatter_only);
    summary.files.push_back(describe(scatter_path));

    const fs::path power_path = dir / "power_decomposition.csv";
    {
        CsvWriter w(power_path.string());
        w.header({"timestamp_s", "specular_dbm", "scatter_dbm", "total_dbm"});
        for (const auto &p : summary.power.series)
        {
            w.field(p.time).field(p.specular_dbm).field(p.scatter_dbm).field(p.total_dbm);
            w.end_row();
        }
        w.close();
    }
    summary.files.push_back(describe(power_path));

    const fs::path summary_path = dir / "scatter_summary.csv";
    {
        CsvWriter w(summary_path.string());
        w.header({"quantity", "value"});
        const std::pair<const char *, double> rows[] = {
            {"window_start_s", window.first},
            {"window_end_s", window.second},
            {"snapshots", static_cast<double>(summary.snapshots)},
            {"mean_specular_mw", summary.power.mean_specular_mw},
            {"mean_scatter_mw", summary.power.mean_scatter_mw},
            {"mean_total_mw", summary.power.mean_total_mw},
            {"specular_fraction", summary.power.specular_fraction},
            {"scatter_fraction", summary.power.scatter_fraction},
            {"mean_scatter_paths", summary.mean_scatter_paths},
            {"delay_spread_with_scatter_s", summary.delay_spread_with_s},
            {"delay_spread_without_scatter_s", summary.delay_spread_without_s},
        };
        for (const auto &[name, value] : rows)
        {
            w.field(name).field(value);
            w.end_row();
        }
        w.close();
    }
    summary.files.push_back(describe(summary_path));

    json details{{"window_s", {window.first, window.second}},
                 {"stats", stats_json(sim.stats)},
                 {"cir_snapshots", summary.cir_snapshots},
                 {"timings_s", {{"metrics", sim.metrics_seconds}, {"total", sim.wall_seconds}}}};
    summary.manifest = write_manifest(dir, config, "scatter-study", std::move(details), summary.files);
    return summary;
}

BenchSummary cmd_bench(const ScenarioConfig &config)
{
    if (config.bench_repeats < 1)
        throw ConfigError("bench_repeats must be at least 1");
    const Scene scene = load_config_scene(config);
    const ChannelModel model = make_channel_model(scene, config, config.scatter_policy);
    const fs::path dir = prepare_output_dir(config);
    const Trajectory trajectory = config.trajectory();

    BenchSummary summary;
    const char *stage_names[] = {"keyframe_rt", "interpolation", "scatter", "metrics", "total"};
    for (const char *mode : {"exact", "interpolated"})
        for (const char *stage : stage_names)
            summary.stages.push_back(BenchStage{mode, stage, {}, 0.0, 0.0});

    for (int rep = 0; rep < config.bench_repeats; ++rep)
    {
        for (int mode = 0; mode < 2; ++mode)
        {
            const double k = mode == 0 ? config.update_step_s : config.kf_interval_s;
            const SimulationResult r = simulate(model, trajectory, config.stream_options(k), config.tx_power_dbm);
            const double values[] = {r.stats.keyframe_seconds, r.stats.interpolation_seconds, r.stats.scatter_seconds,
                                     r.metrics_seconds, r.wall_seconds};
            for (std::size_t s = 0; s < 5; ++s)
                summary.stages[mode * 5 + s].samples.push_back(values[s]);
            (mode == 0 ? summary.rt_exact : summary.rt_interpolated) = r.stats.rt_invocations;
        }
    }
    for (auto &st : summary.stages)
    {
        st.min = *std::min_element(st.samples.begin(), st.samples.end());
        st.median = median(st.samples);
    }
    const double exact_total = summary.stages[4].median;
    const double interp_total = summary.stages[9].median;
    summary.speedup = interp_total > 0.0 ? exact_total / interp_total : kUndefined;

    const fs::path bench_path = dir / "bench.csv";
    {
        CsvWriter w(bench_path.string());
        w.header({"mode", "stage", "repeats", "min_s", "median_s"});
        for (const auto &st : summary.stages)
        {
            w.field(st.mode).field(st.stage).field(static_cast<std::uint64_t>(st.samples.size())).field(st.min).field(st.median);
            w.end_row();
        }
        w.close();
    }
    summary.files.push_back(describe(bench_path));

    json details{{"repeats", config.bench_repeats},
                 {"kf_interval_s", config.kf_interval_s},
                 {"rt_invocations", {{"exact", summary.rt_exact}, {"interpolated", summary.rt_interpolated}}},
                 {"speedup", summary.speedup}};
    summary.manifest = write_manifest(dir, config, "bench", std::move(details), summary.files);
    return summary;
}

SceneSummary summarize_scene(const Scene &scene)
{
    SceneSummary s;
    s.buildings = scene.buildings().size();
    s.facades = scene.facades().size();
    s.vertical_edges = scene.edges().size();
    s.convex_edges = static_cast<std::size_t>(
        std::count_if(scene.edges().begin(), scene.edges().end(), [](const VerticalEdge &e) { return e.convex; }));
    s.scatterers = scene.scatterers().size();
    s.grid_cells = scene.grid_cell_count();
    return s;
}

} // namespace railchan
