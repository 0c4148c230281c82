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

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

const std::map<std::string, std::string> kPresets{{"urban-canyon", "urban_canyon"}};

struct CommonOptions
{
    std::string config;
    std::string preset;
    std::string scene;
    std::string out;
    std::optional<double> duration;
    std::optional<double> speed_kmh;
    std::optional<double> kf_interval;
    std::optional<double> carrier;
    std::optional<std::uint64_t> seed;
    std::string scatter;
    std::vector<std::string> sets;
};

// Overrides as (dotted key, JSON value) pairs.
using Overrides = std::vector<std::pair<std::string, std::string>>;

std::string quoted(const std::string &s)
{
    return nlohmann::json(s).dump();
}

std::string number(double v)
{
    return nlohmann::json(v).dump();
}

void add_common(CLI::App *cmd, CommonOptions &o, bool with_kf)
{
    cmd->add_option("--config", o.config, "Scenario configuration file (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--preset", o.preset, "Built-in scenario (urban-canyon)")->check(CLI::IsMember({"urban-canyon"}));
    cmd->add_option("--scene", o.scene, "Scene file, overrides the configured scene");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--duration", o.duration, "Trajectory duration in seconds");
    cmd->add_option("--speed-kmh", o.speed_kmh, "Train speed in km/h");
    if (with_kf)
        cmd->add_option("--kf-interval", o.kf_interval, "Keyframe interval in seconds");
    cmd->add_option("--carrier-hz", o.carrier, "Carrier frequency in Hz");
    cmd->add_option("--seed", o.seed, "Seed for birth/death ramps");
    cmd->add_option("--scatter", o.scatter, "Scatter policy")->check(CLI::IsMember({"off", "direct", "direct+reflection"}));
    cmd->add_option("--set", o.sets, "Override any configuration key, KEY=VALUE (dotted keys, JSON values)");
    cmd->get_option("--config")->excludes(cmd->get_option("--preset"));
}

Overrides common_overrides(const CommonOptions &o)
{
    Overrides ov;
    if (!o.scene.empty())
        ov.emplace_back("scene", quoted(std::filesystem::absolute(o.scene).lexically_normal().string()));
    if (!o.out.empty())
        ov.emplace_back("output_dir", quoted(o.out));
    if (o.duration)
        ov.emplace_back("trajectory.duration_s", number(*o.duration));
    if (o.speed_kmh)
        ov.emplace_back("trajectory.speed_kmh", number(*o.speed_kmh));
    if (o.kf_interval)
        ov.emplace_back("kf_interval_s", number(*o.kf_interval));
    if (o.carrier)
        ov.emplace_back("carrier_hz", number(*o.carrier));
    if (o.seed)
        ov.emplace_back("seed", std::to_string(*o.seed));
    if (!o.scatter.empty())
        ov.emplace_back("scatter.policy", quoted(o.scatter));
    return ov;
}

int exit_code(rc_status s)
{
    switch (s)
    {
    case RC_OK: return kExitOk;
    case RC_ERR_CONFIG:
    case RC_ERR_SCENE: return kExitConfig;
    default: return kExitRuntime;
    }
}

int report_error(rc_status s, const std::string &context)
{
    std::cerr << "railchan: " << context << ": " << rc_last_error() << '\n';
    return exit_code(s);
}

// Loads the configuration, then applies flag overrides followed by --set overrides.
int load_scenario(const CommonOptions &o, Overrides ov, rc_scenario **out)
{
    rc_status s;
    if (!o.config.empty())
        s = rc_scenario_load_file(o.config.c_str(), out);
    else if (!o.preset.empty())
    {
        const auto path = std::filesystem::path(RAILCHAN_PRESET_DIR) / kPresets.at(o.preset) / "scenario.json";
        s = rc_scenario_load_file(path.string().c_str(), out);
    }
    else
        s = rc_scenario_load_text("{\"version\": 1}", ".", out);
    if (s != RC_OK)
        return report_error(s, "configuration");

    for (const auto &kv : o.sets)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
        {
            std::cerr << "railchan: --set expects KEY=VALUE, got '" << kv << "'\n";
            rc_scenario_free(*out);
            *out = nullptr;
            return kExitUsage;
        }
        ov.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    std::vector<const char *> keys, values;
    for (const auto &[k, v] : ov)
    {
        keys.push_back(k.c_str());
        values.push_back(v.c_str());
    }
    s = rc_scenario_apply(*out, keys.data(), values.data(), ov.size());
    if (s != RC_OK)
    {
        rc_scenario_free(*out);
        *out = nullptr;
        return report_error(s, "configuration");
    }
    return kExitOk;
}

int finish(rc_status s, rc_report *report, const char *command)
{
    if (s != RC_OK)
        return report_error(s, command);
    std::cout << rc_report_text(report);
    rc_report_free(report);
    return kExitOk;
}

bool valid_thread_env()
{
    const char *env = std::getenv("RAILCHAN_THREADS");
    if (!env)
        return true;
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    return end != env && *end == '\0' && v > 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"railchan: dynamic ray-tracing channel simulator for train-to-infrastructure links"};
    app.set_version_flag("--version", std::string("railchan ") + rc_version());
    app.require_subcommand(1);

    CommonOptions run_opts;
    bool exact = false;
    bool no_trace = false;
    auto *run = app.add_subcommand("run", "Simulate the channel along the trajectory");
    add_common(run, run_opts, true);
    run->add_flag("--exact", exact, "Trace every update step instead of interpolating between keyframes");
    run->add_flag("--no-trace", no_trace, "Skip the per-path trace CSV");

    CommonOptions sweep_opts;
    std::vector<double> intervals;
    auto *sweep = app.add_subcommand("sweep", "Compare keyframe intervals against the exact reference");
    add_common(sweep, sweep_opts, false);
    sweep->add_option("--intervals", intervals, "Keyframe intervals in seconds");

    CommonOptions scatter_opts;
    std::vector<double> window;
    std::optional<double> cir_step, bandwidth;
    auto *scatter = app.add_subcommand("scatter-study", "Specular versus scatter power and TV-CIR over the scatter window");
    add_common(scatter, scatter_opts, true);
    scatter->add_option("--window", window, "Scatter window START END in seconds")->expected(2);
    scatter->add_option("--cir-step", cir_step, "TV-CIR column spacing in seconds");
    scatter->add_option("--bandwidth-hz", bandwidth, "TV-CIR bandwidth in Hz");

    CommonOptions bench_opts;
    std::optional<int> repeats;
    auto *bench = app.add_subcommand("bench", "Time exact and keyframed runs per stage");
    add_common(bench, bench_opts, true);
    bench->add_option("--repeats", repeats, "Repetitions per mode")->check(CLI::PositiveNumber);

    std::string scene_path;
    auto *validate = app.add_subcommand("validate-scene", "Check a scene file and print element counts");
    validate->add_option("scene", scene_path, "Scene file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return kExitUsage;
    }

    if (!valid_thread_env())
    {
        std::cerr << "railchan: RAILCHAN_THREADS must be a positive integer\n";
        return kExitUsage;
    }

    if (validate->parsed())
    {
        rc_report *report = nullptr;
        const rc_status status = rc_validate_scene_file(scene_path.c_str(), &report);
        return finish(status, report, "validate-scene");
    }

    rc_scenario *scenario = nullptr;
    rc_report *report = nullptr;
    rc_status status = RC_OK;
    if (run->parsed())
    {
        Overrides ov = common_overrides(run_opts);
        if (no_trace)
            ov.emplace_back("write_trace", "false");
        if (const int rc = load_scenario(run_opts, std::move(ov), &scenario); rc != kExitOk)
            return rc;
        status = rc_cmd_run(scenario, exact ? 1 : 0, &report);
    }
    else if (sweep->parsed())
    {
        Overrides ov = common_overrides(sweep_opts);
        if (!intervals.empty())
            ov.emplace_back("sweep_intervals_s", nlohmann::json(intervals).dump());
        if (const int rc = load_scenario(sweep_opts, std::move(ov), &scenario); rc != kExitOk)
            return rc;
        status = rc_cmd_sweep(scenario, &report);
    }
    else if (scatter->parsed())
    {
        Overrides ov = common_overrides(scatter_opts);
        if (!window.empty())
            ov.emplace_back("scatter.window_s", nlohmann::json(window).dump());
        if (cir_step)
            ov.emplace_back("cir.time_step_s", number(*cir_step));
        if (bandwidth)
            ov.emplace_back("cir.bandwidth_hz", number(*bandwidth));
        if (const int rc = load_scenario(scatter_opts, std::move(ov), &scenario); rc != kExitOk)
            return rc;
        status = rc_cmd_scatter_study(scenario, &report);
    }
    else if (bench->parsed())
    {
        Overrides ov = common_overrides(bench_opts);
        if (repeats)
            ov.emplace_back("bench_repeats", std::to_string(*repeats));
        if (const int rc = load_scenario(bench_opts, std::move(ov), &scenario); rc != kExitOk)
            return rc;
        status = rc_cmd_bench(scenario, &report);
    }
    const char *name = run->parsed() ? "run" : sweep->parsed() ? "sweep" : scatter->parsed() ? "scatter-study" : "bench";
    const int rc = finish(status, report, name);
    rc_scenario_free(scenario);
    return rc;
}
