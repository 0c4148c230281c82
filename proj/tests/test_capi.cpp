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

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace
{

const char *kScene = R"({
  "version": 1,
  "buildings": [
    {"id": 1, "footprint": [[-500, 10], [500, 10], [500, 20], [-500, 20]], "height": 30},
    {"id": 2, "footprint": [[-500, -20], [500, -20], [500, -12], [-500, -12]], "height": 25}
  ],
  "scatterers": [{"id": 1, "base": [0, -8, 0], "radius": 0.375, "height": 8.2, "material": "metal"}]
})";

fs::path work_dir()
{
    const fs::path dir = fs::temp_directory_path() / "railchan_test_capi";
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const std::string &name, const std::string &text)
{
    const fs::path p = work_dir() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string scenario_text(const std::string &out_dir)
{
    return std::string(R"({"version": 1, "scene": "scene.json", "tx": {"position": [0, 0, 15]},
      "trajectory": {"waypoints": [[-100, 0, 4.5], [100, 0, 4.5]], "duration_s": 1.0},
      "sweep_intervals_s": [0.1, 0.2], "scatter": {"window_s": [0.2, 0.6]}, "bench_repeats": 1,
      "output_dir": ")") + out_dir + "\"}";
}

struct Cli
{
    int code;
    std::string out, err;
};

Cli cli(const std::string &args, const std::string &env = "")
{
    const fs::path o = work_dir() / "cli_stdout.txt", e = work_dir() / "cli_stderr.txt";
    const std::string cmd = env + " \"" RAILCHAN_CLI "\" " + args + " >\"" + o.string() + "\" 2>\"" + e.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
}

double value(const rc_report *r, const char *name)
{
    double v = std::nan("");
    REQUIRE(rc_report_value(r, name, &v) == RC_OK);
    return v;
}

} // namespace

TEST_CASE("version and error state", "[capi]")
{
    CHECK(std::string(rc_version()) == "0.3.0");
    rc_scene *scene = nullptr;
    CHECK(rc_scene_load_file("/nonexistent/scene.json", &scene) == RC_ERR_SCENE);
    CHECK(scene == nullptr);
    CHECK(std::string(rc_last_error()).find("/nonexistent/scene.json") != std::string::npos);
    CHECK(rc_scene_load_text("{", &scene) == RC_ERR_SCENE);
    CHECK(rc_scene_load_text(nullptr, &scene) == RC_ERR_INVALID_ARGUMENT);
    CHECK(rc_scene_load_text(kScene, nullptr) == RC_ERR_INVALID_ARGUMENT);
    REQUIRE(rc_scene_load_text(kScene, &scene) == RC_OK);
    CHECK(std::string(rc_last_error()).empty());

    rc_scene_stats st{};
    REQUIRE(rc_scene_get_stats(scene, &st) == RC_OK);
    CHECK(st.buildings == 2);
    CHECK(st.facades == 8);
    CHECK(st.scatterers == 1);
    CHECK(rc_scene_get_stats(nullptr, &st) == RC_ERR_INVALID_ARGUMENT);

    const double a[3] = {0, 0, 5}, b[3] = {0, 30, 5}, c[3] = {50, 0, 5};
    int los = -1;
    REQUIRE(rc_scene_is_los(scene, a, c, &los) == RC_OK);
    CHECK(los == 1);
    REQUIRE(rc_scene_is_los(scene, a, b, &los) == RC_OK);
    CHECK(los == 0);

    rc_scene_free(scene);
    rc_scene_free(nullptr);
    rc_pathset_free(nullptr);
    rc_scenario_free(nullptr);
    rc_report_free(nullptr);
    CHECK(std::string(rc_report_text(nullptr)).empty());
}

TEST_CASE("single-position tracing", "[capi]")
{
    rc_scene *scene = nullptr;
    REQUIRE(rc_scene_load_text(kScene, &scene) == RC_OK);
    rc_trace_options o;
    rc_trace_options_init(&o);
    CHECK(o.carrier_hz == 1.9e9);
    CHECK(o.max_reflections == 2);
    o.max_reflections = 1;
    o.max_vertical_diffractions = 0;
    o.rooftop = 0;
    o.scatter = RC_SCATTER_OFF;

    const double tx[3] = {0, 0, 5}, rx[3] = {40, 0, 5};
    rc_pathset *set = nullptr;
    REQUIRE(rc_trace(scene, tx, rx, &o, &set) == RC_OK);
    REQUIRE(rc_pathset_size(set) == 3);

    rc_path p{};
    REQUIRE(rc_pathset_get(set, 0, &p) == RC_OK);
    CHECK(p.length_m == Catch::Approx(40.0));
    CHECK(p.delay_s == Catch::Approx(40.0 / 299792458.0));
    CHECK(p.interactions == 0);
    CHECK(p.tag == RC_TAG_SPECULAR);
    // Free-space loss at 40 m and 1.9 GHz.
    const double mag = std::hypot(p.t_re[0], p.t_im[0]);
    CHECK(20.0 * std::log10(mag) == Catch::Approx(-70.05).margin(0.05));

    char buf[64];
    std::size_t needed = 0;
    REQUIRE(rc_pathset_signature(set, 0, buf, sizeof buf, &needed) == RC_OK);
    CHECK(std::string(buf) == "LOS");
    CHECK(needed == 4);
    REQUIRE(rc_pathset_signature(set, 1, buf, 3, &needed) == RC_OK);
    CHECK(std::string(buf).size() == 2);
    CHECK(needed > 3);

    double v[3];
    std::size_t count = 0;
    REQUIRE(rc_pathset_vertex(set, 1, 1, v, &count) == RC_OK);
    CHECK(count == 3);
    CHECK(std::abs(std::abs(v[1]) - (v[1] > 0 ? 10.0 : 12.0)) < 1e-9);
    CHECK(rc_pathset_vertex(set, 1, 3, v, &count) == RC_ERR_INVALID_ARGUMENT);
    CHECK(rc_pathset_get(set, 3, &p) == RC_ERR_INVALID_ARGUMENT);
    rc_pathset_free(set);

    o.scatter = RC_SCATTER_DIRECT;
    REQUIRE(rc_trace(scene, tx, rx, &o, &set) == RC_OK);
    REQUIRE(rc_pathset_size(set) == 4);
    REQUIRE(rc_pathset_get(set, 3, &p) == RC_OK);
    CHECK(p.tag == RC_TAG_SCATTER);
    rc_pathset_free(set);

    o.max_reflections = 5;
    CHECK(rc_trace(scene, tx, rx, &o, &set) == RC_ERR_INVALID_ARGUMENT);
    CHECK(rc_trace(scene, tx, rx, &o, nullptr) == RC_ERR_INVALID_ARGUMENT);
    CHECK(rc_trace(nullptr, tx, rx, &o, &set) == RC_ERR_INVALID_ARGUMENT);
    // NULL options select the defaults.
    REQUIRE(rc_trace(scene, tx, rx, nullptr, &set) == RC_OK);
    CHECK(rc_pathset_size(set) > 3);
    rc_pathset_free(set);
    rc_trace_options_init(&o);
    const double inside[3] = {0, 15, 5};
    CHECK(rc_trace(scene, tx, inside, &o, &set) == RC_ERR_DOMAIN);
    rc_scene_free(scene);
}

TEST_CASE("scenario handles and overrides", "[capi]")
{
    rc_scenario *s = nullptr;
    CHECK(rc_scenario_load_text("{\"version\": 1, \"bogus\": 1}", nullptr, &s) == RC_ERR_CONFIG);
    CHECK(std::string(rc_last_error()).find("config.bogus") != std::string::npos);
    CHECK(rc_scenario_load_file("/nonexistent.json", &s) == RC_ERR_CONFIG);
    REQUIRE(rc_scenario_load_text("{\"version\": 1}", "/base", &s) == RC_OK);

    REQUIRE(rc_scenario_set(s, "seed", "5") == RC_OK);
    CHECK(rc_scenario_set(s, "seed", "-1") == RC_ERR_CONFIG);
    const char *keys[] = {"trajectory.duration_s", "kf_interval_s"};
    const char *bad[] = {"2", "0.015"};
    CHECK(rc_scenario_apply(s, keys, bad, 2) == RC_ERR_CONFIG);
    const char *good[] = {"2", "0.2"};
    REQUIRE(rc_scenario_apply(s, keys, good, 2) == RC_OK);
    CHECK(rc_scenario_apply(s, keys, nullptr, 2) == RC_ERR_INVALID_ARGUMENT);

    std::size_t needed = 0;
    REQUIRE(rc_scenario_echo(s, nullptr, 0, &needed) == RC_OK);
    std::string echo(needed, '\0');
    REQUIRE(rc_scenario_echo(s, echo.data(), echo.size(), &needed) == RC_OK);
    echo.resize(needed - 1);
    CHECK(echo.find("\"seed\": 5") != std::string::npos);
    CHECK(echo.find("\"duration_s\": 2.0") != std::string::npos);
    CHECK(echo.find("\"kf_interval_s\": 0.2") != std::string::npos);

    rc_report *r = nullptr;
    CHECK(rc_cmd_run(s, 0, &r) == RC_ERR_CONFIG);
    CHECK(r == nullptr);
    rc_scenario_free(s);
}

TEST_CASE("commands through the library", "[capi]")
{
    write_file("scene.json", kScene);
    const std::string out = (work_dir() / "lib_out").string();
    fs::remove_all(out);
    rc_scenario *s = nullptr;
    REQUIRE(rc_scenario_load_text(scenario_text(out).c_str(), work_dir().c_str(), &s) == RC_OK);

    rc_report *r = nullptr;
    REQUIRE(rc_cmd_run(s, 0, &r) == RC_OK);
    CHECK(value(r, "snapshots") == 101);
    CHECK(value(r, "rt_invocations") == 11);
    double dummy;
    CHECK(rc_report_value(r, "nope", &dummy) == RC_ERR_INVALID_ARGUMENT);
    CHECK(std::string(rc_report_text(r)).find("run (interpolated") != std::string::npos);
    rc_report_free(r);
    CHECK(fs::exists(fs::path(out) / "trace.csv"));
    CHECK(fs::exists(fs::path(out) / "metrics.csv"));
    const std::string manifest = slurp(fs::path(out) / "manifest.json");
    CHECK(manifest.find("\"sha256\"") != std::string::npos);
    CHECK(manifest.find("\"version\": \"0.3.0\"") != std::string::npos);

    REQUIRE(rc_cmd_run(s, 1, &r) == RC_OK);
    CHECK(value(r, "rt_invocations") == 101);
    rc_report_free(r);

    REQUIRE(rc_cmd_sweep(s, &r) == RC_OK);
    CHECK(value(r, "reference_rt_invocations") == 101);
    CHECK(value(r, "rt_invocations@0.1") == 11);
    CHECK(value(r, "rt_invocations@0.2") == 6);
    CHECK(value(r, "nrmse.power_vv@0.1") >= 0.0);
    rc_report_free(r);
    CHECK(fs::exists(fs::path(out) / "sweep_nrmse.csv"));

    REQUIRE(rc_cmd_scatter_study(s, &r) == RC_OK);
    CHECK(value(r, "snapshots") == 41);
    CHECK(value(r, "cir_snapshots") == 5);
    CHECK(value(r, "scatter_fraction") > 0.0);
    rc_report_free(r);
    CHECK(fs::exists(fs::path(out) / "tvcir_scatter.csv"));

    REQUIRE(rc_cmd_bench(s, &r) == RC_OK);
    CHECK(value(r, "speedup") > 0.0);
    CHECK(value(r, "exact.total.median") > 0.0);
    rc_report_free(r);

    REQUIRE(rc_validate_scene_file((work_dir() / "scene.json").c_str(), &r) == RC_OK);
    CHECK(value(r, "buildings") == 2);
    rc_report_free(r);

    CHECK(rc_cmd_run(nullptr, 0, &r) == RC_ERR_INVALID_ARGUMENT);
    REQUIRE(rc_scenario_set(s, "scene", "missing.json") == RC_OK);
    CHECK(rc_cmd_run(s, 0, &r) == RC_ERR_SCENE);
    rc_scenario_free(s);
}

TEST_CASE("command-line exit codes", "[capi][cli]")
{
    write_file("scene.json", kScene);
    const std::string out = (work_dir() / "cli_out").string();
    const std::string cfg = write_file("scenario.json", scenario_text(out));

    Cli c = cli("--version");
    CHECK(c.code == 0);
    CHECK(c.out.find("0.3.0") != std::string::npos);

    CHECK(cli("").code == 1);
    CHECK(cli("frobnicate").code == 1);
    CHECK(cli("run --config \"" + cfg + "\" --no-such-flag").code == 1);
    CHECK(cli("run --config /nonexistent/cfg.json").code == 1);

    c = cli("run --config \"" + cfg + "\" --scene /nonexistent/scene.json");
    CHECK(c.code == 2);
    CHECK(c.err.find("/nonexistent/scene.json") != std::string::npos);

    CHECK(cli("run --config \"" + cfg + "\" --kf-interval 0.015").code == 2);
    CHECK(cli("run --config \"" + cfg + "\" --set bogus=1").code == 2);
    CHECK(cli("run --config \"" + cfg + "\"", "RAILCHAN_THREADS=zero").code == 1);

    c = cli("validate-scene \"" + (work_dir() / "scene.json").string() + "\"");
    CHECK(c.code == 0);
    CHECK(c.out.find("valid") != std::string::npos);
    const std::string broken = write_file("broken.json", "{\"version\": 1, \"buildings\": [{\"id\": 1}]}");
    CHECK(cli("validate-scene \"" + broken + "\"").code == 2);

    c = cli("run --config \"" + cfg + "\" --duration 0.5 --seed 3 --set ramp_fraction=0.25", "RAILCHAN_THREADS=2");
    CHECK(c.code == 0);
    const std::string manifest = slurp(fs::path(out) / "manifest.json");
    CHECK(manifest.find("\"seed\": 3") != std::string::npos);
    CHECK(manifest.find("\"threads\": 2") != std::string::npos);
    CHECK(manifest.find("\"ramp_fraction\": 0.25") != std::string::npos);
    CHECK(manifest.find("\"duration_s\": 0.5") != std::string::npos);
    std::ifstream trace(fs::path(out) / "trace.csv");
    std::string header;
    std::getline(trace, header);
    CHECK(header.rfind("timestamp_s,path_id,signature,delay_s,", 0) == 0);
}
