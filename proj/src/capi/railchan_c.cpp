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

#include "railchan/railchan.h"

#include "railchan/drivers.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <map>
#include <memory>
#include <sstream>

struct rc_scene
{
    railchan::Scene scene;
};

struct rc_scenario
{
    railchan::ScenarioDocument document;
    railchan::ScenarioConfig config;
};

struct rc_pathset
{
    std::vector<railchan::RayPath> paths;
};

struct rc_report
{
    std::string text;
    std::map<std::string, double> values;
};

namespace
{

using namespace railchan;

thread_local std::string last_error;

rc_status fail(rc_status s, const std::string &message)
{
    last_error = message;
    return s;
}

template <class F>
rc_status guarded(F &&f)
{
    try
    {
        last_error.clear();
        f();
        return RC_OK;
    }
    catch (const ConfigError &e)
    {
        return fail(RC_ERR_CONFIG, e.what());
    }
    catch (const SceneError &e)
    {
        return fail(RC_ERR_SCENE, e.what());
    }
    catch (const std::domain_error &e)
    {
        return fail(RC_ERR_DOMAIN, e.what());
    }
    catch (const std::invalid_argument &e)
    {
        return fail(RC_ERR_INVALID_ARGUMENT, e.what());
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        return fail(RC_ERR_IO, e.what());
    }
    catch (const std::ios_base::failure &e)
    {
        return fail(RC_ERR_IO, e.what());
    }
    catch (const std::exception &e)
    {
        return fail(RC_ERR_RUNTIME, e.what());
    }
    catch (...)
    {
        return fail(RC_ERR_RUNTIME, "unknown error");
    }
}

rc_status null_argument(const char *what)
{
    return fail(RC_ERR_INVALID_ARGUMENT, std::string(what) + " must not be null");
}

rc_status copy_string(const std::string &s, char *buf, std::size_t buflen, std::size_t *needed)
{
    if (needed)
        *needed = s.size() + 1;
    if (buf && buflen > 0)
    {
        const std::size_t n = std::min(buflen - 1, s.size());
        std::memcpy(buf, s.data(), n);
        buf[n] = '\0';
    }
    return RC_OK;
}

Vec3 vec(const double p[3])
{
    return {p[0], p[1], p[2]};
}

std::string fmt(double v)
{
    return format_double(v);
}

void add_files(std::ostringstream &os, const std::vector<OutputFile> &files, const std::string &manifest)
{
    for (const auto &f : files)
        os << "  " << f.path << "  " << f.bytes << " bytes  sha256 " << f.sha256 << '\n';
    os << "manifest: " << manifest << '\n';
}

rc_report *run_report(const RunSummary &s)
{
    auto r = std::make_unique<rc_report>();
    const StreamStats &st = s.result.stats;
    std::ostringstream os;
    os << "run (" << (s.exact ? "exact" : "interpolated") << ", keyframe interval " << fmt(s.kf_interval_s) << " s)\n"
       << "  snapshots " << st.snapshots << ", ray-tracer invocations " << st.rt_invocations << ", scatter evaluations "
       << st.scatter_invocations << '\n'
       << "  keyframe RT " << fmt(st.keyframe_seconds) << " s, interpolation " << fmt(st.interpolation_seconds) << " s, scatter "
       << fmt(st.scatter_seconds) << " s, total " << fmt(s.result.wall_seconds) << " s\n";
    add_files(os, s.files, s.manifest);
    r->text = os.str();
    r->values = {{"snapshots", static_cast<double>(st.snapshots)},
                 {"rt_invocations", static_cast<double>(st.rt_invocations)},
                 {"scatter_invocations", static_cast<double>(st.scatter_invocations)},
                 {"keyframe_seconds", st.keyframe_seconds},
                 {"interpolation_seconds", st.interpolation_seconds},
                 {"scatter_seconds", st.scatter_seconds},
                 {"total_seconds", s.result.wall_seconds}};
    return r.release();
}

rc_report *sweep_report(const SweepSummary &s)
{
    auto r = std::make_unique<rc_report>();
    std::ostringstream os;
    os << "sweep: reference " << s.reference.stats.rt_invocations << " RT invocations, " << fmt(s.reference.wall_seconds) << " s\n";
    os << "  interval_s  rt_calls  norm_time";
    for (const auto &info : metric_table())
        os << "  " << info.name;
    os << '\n';
    for (const auto &row : s.rows)
    {
        os << "  " << fmt(row.interval_s) << "  " << row.rt_invocations << "  " << fmt(row.normalized_total_time);
        for (const auto &e : row.report.metrics)
            os << "  " << fmt(e.nrmse) << (e.degenerate ? "*" : "");
        os << '\n';
        const std::string key = fmt(row.interval_s);
        r->values["rt_invocations@" + key] = static_cast<double>(row.rt_invocations);
        r->values["normalized_time@" + key] = row.normalized_total_time;
        for (const auto &e : row.report.metrics)
            r->values["nrmse." + e.name + "@" + key] = e.nrmse;
    }
    os << "  (* degenerate normalisation: Q90 - Q10 below threshold)\n";
    add_files(os, s.files, s.manifest);
    r->values["reference_rt_invocations"] = static_cast<double>(s.reference.stats.rt_invocations);
    r->text = os.str();
    return r.release();
}

rc_report *scatter_report(const ScatterStudySummary &s)
{
    auto r = std::make_unique<rc_report>();
    std::ostringstream os;
    os << "scatter study: " << s.snapshots << " snapshots, " << s.cir_snapshots << " CIR columns\n"
       << "  specular fraction " << fmt(s.power.specular_fraction) << ", scatter fraction " << fmt(s.power.scatter_fraction) << '\n'
       << "  mean scatter paths " << fmt(s.mean_scatter_paths) << '\n'
       << "  delay spread with scatter " << fmt(s.delay_spread_with_s) << " s, without " << fmt(s.delay_spread_without_s) << " s\n";
    add_files(os, s.files, s.manifest);
    r->text = os.str();
    r->values = {{"snapshots", static_cast<double>(s.snapshots)},
                 {"cir_snapshots", static_cast<double>(s.cir_snapshots)},
                 {"specular_fraction", s.power.specular_fraction},
                 {"scatter_fraction", s.power.scatter_fraction},
                 {"mean_scatter_paths", s.mean_scatter_paths},
                 {"delay_spread_with_s", s.delay_spread_with_s},
                 {"delay_spread_without_s", s.delay_spread_without_s}};
    return r.release();
}

rc_report *bench_report(const BenchSummary &s)
{
    auto r = std::make_unique<rc_report>();
    std::ostringstream os;
    os << "bench: RT invocations exact " << s.rt_exact << ", interpolated " << s.rt_interpolated << ", speedup " << fmt(s.speedup)
       << '\n';
    for (const auto &st : s.stages)
    {
        os << "  " << st.mode << ' ' << st.stage << "  min " << fmt(st.min) << " s  median " << fmt(st.median) << " s\n";
        r->values[st.mode + "." + st.stage + ".median"] = st.median;
        r->values[st.mode + "." + st.stage + ".min"] = st.min;
    }
    add_files(os, s.files, s.manifest);
    r->values["speedup"] = s.speedup;
    r->values["rt_exact"] = static_cast<double>(s.rt_exact);
    r->values["rt_interpolated"] = static_cast<double>(s.rt_interpolated);
    r->text = os.str();
    return r.release();
}

} // namespace

extern "C" {

const char *rc_version(void)
{
    return railchan::version();
}

const char *rc_last_error(void)
{
    return last_error.c_str();
}

rc_status rc_scene_load_file(const char *path, rc_scene **out)
{
    if (!path || !out)
        return null_argument("path and out");
    return guarded([&] { *out = new rc_scene{load_scene_file(path)}; });
}

rc_status rc_scene_load_text(const char *json_text, rc_scene **out)
{
    if (!json_text || !out)
        return null_argument("json_text and out");
    return guarded([&] { *out = new rc_scene{load_scene(json_text)}; });
}

void rc_scene_free(rc_scene *scene)
{
    delete scene;
}

rc_status rc_scene_get_stats(const rc_scene *scene, rc_scene_stats *out)
{
    if (!scene || !out)
        return null_argument("scene and out");
    const SceneSummary s = summarize_scene(scene->scene);
    *out = rc_scene_stats{s.buildings, s.facades, s.vertical_edges, s.convex_edges, s.scatterers, s.grid_cells};
    return RC_OK;
}

rc_status rc_scene_is_los(const rc_scene *scene, const double p[3], const double q[3], int *out)
{
    if (!scene || !p || !q || !out)
        return null_argument("scene, p, q and out");
    return guarded([&] { *out = scene->scene.is_los(vec(p), vec(q)) ? 1 : 0; });
}

void rc_trace_options_init(rc_trace_options *options)
{
    if (!options)
        return;
    const TraceLimits limits;
    options->carrier_hz = 1.9e9;
    options->max_reflections = limits.max_reflections;
    options->max_vertical_diffractions = limits.max_vertical_diffractions;
    options->rooftop = limits.rooftop ? 1 : 0;
    options->loss_floor_db = limits.loss_floor_db;
    options->scatter = RC_SCATTER_DIRECT;
    options->tx_gain_dbi = 0.0;
    options->rx_gain_dbi = 0.0;
}

rc_status rc_trace(const rc_scene *scene, const double tx[3], const double rx[3], const rc_trace_options *options, rc_pathset **out)
{
    if (!scene || !tx || !rx || !out)
        return null_argument("scene, tx, rx and out");
    rc_trace_options o;
    rc_trace_options_init(&o);
    if (options)
        o = *options;
    return guarded([&] {
        if (!(o.carrier_hz > 0.0) || !std::isfinite(o.carrier_hz))
            throw std::invalid_argument("carrier_hz must be positive");
        ScatterPolicy policy;
        switch (o.scatter)
        {
        case RC_SCATTER_OFF: policy = ScatterPolicy::Off; break;
        case RC_SCATTER_DIRECT: policy = ScatterPolicy::Direct; break;
        case RC_SCATTER_DIRECT_AND_REFLECTION: policy = ScatterPolicy::DirectAndReflection; break;
        default: throw std::invalid_argument("unknown scatter policy");
        }
        TraceLimits limits{o.max_reflections, o.max_vertical_diffractions, o.rooftop != 0, o.loss_floor_db};
        const ChannelModel model(scene->scene, vec(tx), CarrierConfig{o.carrier_hz}, limits, policy, AntennaConfig{o.tx_gain_dbi},
                                 AntennaConfig{o.rx_gain_dbi});
        auto set = std::make_unique<rc_pathset>();
        set->paths = model.specular(vec(rx));
        for (auto &p : model.scatter(vec(rx)))
            set->paths.push_back(std::move(p));
        *out = set.release();
    });
}

size_t rc_pathset_size(const rc_pathset *set)
{
    return set ? set->paths.size() : 0;
}

rc_status rc_pathset_get(const rc_pathset *set, size_t index, rc_path *out)
{
    if (!set || !out)
        return null_argument("set and out");
    if (index >= set->paths.size())
        return fail(RC_ERR_INVALID_ARGUMENT, "path index out of range");
    const RayPath &p = set->paths[index];
    rc_path r{};
    r.length_m = p.length;
    r.delay_s = p.delay;
    r.aod_az_rad = p.aod.azimuth;
    r.aod_el_rad = p.aod.elevation;
    r.aoa_az_rad = p.aoa.azimuth;
    r.aoa_el_rad = p.aoa.elevation;
    r.doppler_hz = p.doppler_hz;
    const PolPair order[4] = {kVV, kVH, kHV, kHH};
    for (int k = 0; k < 4; ++k)
    {
        r.t_re[k] = p.transfer(order[k]).real();
        r.t_im[k] = p.transfer(order[k]).imag();
    }
    r.interactions = p.interactions.size();
    r.tag = p.tag == PathTag::Scatter ? RC_TAG_SCATTER : RC_TAG_SPECULAR;
    *out = r;
    return RC_OK;
}

rc_status rc_pathset_signature(const rc_pathset *set, size_t index, char *buf, size_t buflen, size_t *needed)
{
    if (!set)
        return null_argument("set");
    if (index >= set->paths.size())
        return fail(RC_ERR_INVALID_ARGUMENT, "path index out of range");
    return copy_string(to_string(set->paths[index].signature()), buf, buflen, needed);
}

rc_status rc_pathset_vertex(const rc_pathset *set, size_t index, size_t k, double out[3], size_t *count)
{
    if (!set)
        return null_argument("set");
    if (index >= set->paths.size())
        return fail(RC_ERR_INVALID_ARGUMENT, "path index out of range");
    const auto &v = set->paths[index].vertices;
    if (count)
        *count = v.size();
    if (out)
    {
        if (k >= v.size())
            return fail(RC_ERR_INVALID_ARGUMENT, "vertex index out of range");
        out[0] = v[k].x;
        out[1] = v[k].y;
        out[2] = v[k].z;
    }
    return RC_OK;
}

void rc_pathset_free(rc_pathset *set)
{
    delete set;
}

rc_status rc_scenario_load_file(const char *path, rc_scenario **out)
{
    if (!path || !out)
        return null_argument("path and out");
    return guarded([&] {
        auto doc = ScenarioDocument::from_file(path);
        auto config = doc.config();
        *out = new rc_scenario{std::move(doc), std::move(config)};
    });
}

rc_status rc_scenario_load_text(const char *json_text, const char *base_dir, rc_scenario **out)
{
    if (!json_text || !out)
        return null_argument("json_text and out");
    return guarded([&] {
        auto doc = ScenarioDocument::from_text(json_text, base_dir ? base_dir : ".");
        auto config = doc.config();
        *out = new rc_scenario{std::move(doc), std::move(config)};
    });
}

rc_status rc_scenario_set(rc_scenario *scenario, const char *key, const char *value)
{
    if (!scenario || !key || !value)
        return null_argument("scenario, key and value");
    return guarded([&] {
        ScenarioDocument doc = scenario->document;
        doc.set(key, value);
        ScenarioConfig config = doc.config();
        scenario->document = std::move(doc);
        scenario->config = std::move(config);
    });
}

rc_status rc_scenario_apply(rc_scenario *scenario, const char *const *keys, const char *const *values, size_t n)
{
    if (!scenario || (n > 0 && (!keys || !values)))
        return null_argument("scenario, keys and values");
    return guarded([&] {
        ScenarioDocument doc = scenario->document;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (!keys[i] || !values[i])
                throw std::invalid_argument("override " + std::to_string(i) + " is null");
            doc.set(keys[i], values[i]);
        }
        ScenarioConfig config = doc.config();
        scenario->document = std::move(doc);
        scenario->config = std::move(config);
    });
}

rc_status rc_scenario_echo(const rc_scenario *scenario, char *buf, size_t buflen, size_t *needed)
{
    if (!scenario)
        return null_argument("scenario");
    return copy_string(config_to_json(scenario->config), buf, buflen, needed);
}

void rc_scenario_free(rc_scenario *scenario)
{
    delete scenario;
}

rc_status rc_cmd_run(const rc_scenario *scenario, int exact, rc_report **out)
{
    if (!scenario || !out)
        return null_argument("scenario and out");
    return guarded([&] { *out = run_report(cmd_run(scenario->config, exact != 0)); });
}

rc_status rc_cmd_sweep(const rc_scenario *scenario, rc_report **out)
{
    if (!scenario || !out)
        return null_argument("scenario and out");
    return guarded([&] { *out = sweep_report(cmd_sweep(scenario->config)); });
}

rc_status rc_cmd_scatter_study(const rc_scenario *scenario, rc_report **out)
{
    if (!scenario || !out)
        return null_argument("scenario and out");
    return guarded([&] { *out = scatter_report(cmd_scatter_study(scenario->config)); });
}

rc_status rc_cmd_bench(const rc_scenario *scenario, rc_report **out)
{
    if (!scenario || !out)
        return null_argument("scenario and out");
    return guarded([&] { *out = bench_report(cmd_bench(scenario->config)); });
}

rc_status rc_validate_scene_file(const char *path, rc_report **out)
{
    if (!path || !out)
        return null_argument("path and out");
    return guarded([&] {
        const Scene scene = load_scene_file(path);
        const SceneSummary s = summarize_scene(scene);
        auto r = std::make_unique<rc_report>();
        std::ostringstream os;
        os << "scene '" << path << "' is valid\n"
           << "  buildings " << s.buildings << ", facades " << s.facades << ", vertical edges " << s.vertical_edges << " ("
           << s.convex_edges << " convex), scatterers " << s.scatterers << ", grid cells " << s.grid_cells << '\n';
        r->text = os.str();
        r->values = {{"buildings", static_cast<double>(s.buildings)},       {"facades", static_cast<double>(s.facades)},
                     {"vertical_edges", static_cast<double>(s.vertical_edges)}, {"convex_edges", static_cast<double>(s.convex_edges)},
                     {"scatterers", static_cast<double>(s.scatterers)},     {"grid_cells", static_cast<double>(s.grid_cells)}};
        *out = r.release();
    });
}

const char *rc_report_text(const rc_report *report)
{
    return report ? report->text.c_str() : "";
}

rc_status rc_report_value(const rc_report *report, const char *name, double *out)
{
    if (!report || !name || !out)
        return null_argument("report, name and out");
    const auto it = report->values.find(name);
    if (it == report->values.end())
        return fail(RC_ERR_INVALID_ARGUMENT, std::string("report has no value '") + name + "'");
    *out = it->second;
    return RC_OK;
}

void rc_report_free(rc_report *report)
{
    delete report;
}

} // extern "C"
