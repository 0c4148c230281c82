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

#include "railchan/csv.hpp"
#include "railchan/scenario.hpp"

#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace railchan;
using Catch::Approx;
namespace fs = std::filesystem;

namespace
{

std::string slurp(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_file(const std::string &name)
{
    const fs::path dir = fs::temp_directory_path() / "railchan_test_scenario_csv";
    fs::create_directories(dir);
    return (dir / name).string();
}

ScenarioConfig parse(const std::string &text) { return ScenarioDocument::from_text(text, "/base").config(); }

} // namespace

TEST_CASE("minimal config fills defaults", "[config]")
{
    const ScenarioConfig c = parse(R"({"version": 1, "scene": "s.json"})");
    CHECK(c.scene_path == "/base/s.json");
    CHECK(c.carrier_hz == 1.9e9);
    CHECK(c.duration_s == 60.0);
    CHECK(c.kf_interval_s == 0.1);
    CHECK(c.limits.max_reflections == 2);
    CHECK(c.scatter_policy == ScatterPolicy::Direct);
    CHECK_FALSE(c.scatter_window_s.has_value());
    CHECK(c.seed == 1);
    CHECK(parse(R"({"version": 1, "scene": "/abs/s.json"})").scene_path == "/abs/s.json");
    CHECK(parse(R"({"version": 1})").scene_path.empty());
}

TEST_CASE("the preset scenario parses to the documented values", "[config]")
{
    const ScenarioConfig c = ScenarioDocument::from_file(std::string(RAILCHAN_PRESET_DIR) + "/urban_canyon/scenario.json").config();
    CHECK(fs::path(c.scene_path).filename() == "scene.json");
    CHECK(fs::exists(c.scene_path));
    CHECK(c.tx_position == Vec3{750, 20, 20.5});
    CHECK(c.tx_power_dbm == 43.0);
    CHECK(c.speed_kmh == 100.0);
    CHECK(c.duration_s == 60.0);
    CHECK(c.update_step_s == 0.01);
    CHECK(c.sweep_intervals_s == std::vector<double>{0.05, 0.1, 0.2, 0.5});
    REQUIRE(c.scatter_window_s.has_value());
    CHECK(c.scatter_window_s->first == 18.5);
    CHECK(c.scatter_window_s->second == 23.9);
    CHECK(c.cir_bandwidth_hz == 100e6);
    CHECK(std::string(to_string(c.cir_pol)) == "VV");
    CHECK(c.trajectory().position(c.duration_s).x == Approx(1666.6667).margin(1e-3));

    // The echo round-trips.
    const ScenarioConfig again = ScenarioDocument::from_text(config_to_json(c), "/elsewhere").config();
    CHECK(config_to_json(again) == config_to_json(c));
}

TEST_CASE("invalid configs are rejected with the key path", "[config]")
{
    const auto fails_with = [](const std::string &text, const std::string &needle) {
        try
        {
            parse(text);
        }
        catch (const ConfigError &e)
        {
            return std::string(e.what()).find(needle) != std::string::npos;
        }
        return false;
    };
    CHECK(fails_with(R"({"version": 1, "bogus": 3})", "config.bogus: unknown key"));
    CHECK(fails_with(R"({"version": 1, "tx": {"powr_dbm": 3}})", "config.tx.powr_dbm"));
    CHECK(fails_with(R"({"scene": "x"})", "config.version"));
    CHECK(fails_with(R"({"version": 2})", "unsupported version"));
    CHECK(fails_with(R"({"version": 1, "carrier_hz": "high"})", "config.carrier_hz: expected a number"));
    CHECK(fails_with(R"({"version": 1, "carrier_hz": -1})", "config.carrier_hz"));
    CHECK(fails_with(R"({"version": 1, "kf_interval_s": 0.015})", "config.kf_interval_s"));
    CHECK(fails_with(R"({"version": 1, "sweep_intervals_s": [0.1, 0.005]})", "config.sweep_intervals_s[1]"));
    CHECK(fails_with(R"({"version": 1, "trajectory": {"duration_s": 100}})", "config.trajectory"));
    CHECK(fails_with(R"({"version": 1, "trajectory": {"waypoints": [[0, 0, 0]]}})", "config.trajectory.waypoints"));
    CHECK(fails_with(R"({"version": 1, "trajectory": {"waypoints": [[0, 0], [1, 1]]}})", "config.trajectory.waypoints[0]"));
    CHECK(fails_with(R"({"version": 1, "limits": {"max_reflections": 3}})", "config.limits.max_reflections"));
    CHECK(fails_with(R"({"version": 1, "scatter": {"policy": "all"}})", "config.scatter.policy"));
    CHECK(fails_with(R"({"version": 1, "scatter": {"window_s": [5, 2]}})", "config.scatter.window_s"));
    CHECK(fails_with(R"({"version": 1, "cir": {"resolution_s": 1e-8}})", "config.cir.resolution_s"));
    CHECK(fails_with(R"({"version": 1, "cir": {"pol": "XY"}})", "config.cir.pol"));
    CHECK(fails_with(R"({"version": 1, "seed": -4})", "config.seed"));
    CHECK(fails_with(R"({"version": 1, "ramp_fraction": 1.5})", "config.ramp_fraction"));
    CHECK(fails_with(R"({"version": 1, "write_trace": "yes"})", "config.write_trace"));
    CHECK(fails_with(R"({"version": 1, "bench_repeats": 0})", "config.bench_repeats"));
    CHECK_THROWS_AS(ScenarioDocument::from_text("{not json"), ConfigError);
    CHECK_THROWS_AS(ScenarioDocument::from_text("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(ScenarioDocument::from_file("/nonexistent/config.json"), ConfigError);

    // A window reaching past the end of the run is accepted.
    CHECK(parse(R"({"version": 1, "scatter": {"window_s": [50, 70]}})").scatter_window_s->second == 70.0);
}

TEST_CASE("dotted overrides", "[config]")
{
    ScenarioDocument d = ScenarioDocument::from_text(R"({"version": 1, "trajectory": {"speed_kmh": 80}})", "/b");
    d.set("trajectory.duration_s", "4");
    d.set("cir.pol", "HH");
    d.set("scatter.window_s", "[1, 2]");
    d.set("output_dir", "out dir");
    d.set("seed", "42");
    const ScenarioConfig c = d.config();
    CHECK(c.duration_s == 4.0);
    CHECK(c.speed_kmh == 80.0);
    CHECK(std::string(to_string(c.cir_pol)) == "HH");
    CHECK(c.scatter_window_s->second == 2.0);
    CHECK(c.output_dir == "out dir");
    CHECK(c.seed == 42);
    CHECK(d.base_dir() == "/b");

    CHECK_THROWS_AS(d.set("", "1"), ConfigError);
    CHECK_THROWS_AS(d.set("trajectory..x", "1"), ConfigError);
    CHECK_THROWS_AS(d.set("seed.inner", "1"), ConfigError);
    d.set("trajectory.speed", "1");
    CHECK_THROWS_AS(d.config(), ConfigError);
}

TEST_CASE("stream options follow the config", "[config]")
{
    ScenarioConfig c = parse(R"({"version": 1, "ramp_fraction": 0.25, "seed": 9, "scatter": {"window_s": [1, 2]}})");
    const StreamOptions o = c.stream_options(0.2);
    CHECK(o.kf_interval == 0.2);
    CHECK(o.update_step == 0.01);
    CHECK(o.ramp_fraction == 0.25);
    CHECK(o.seed == 9);
    CHECK(o.scatter_window->first == 1.0);
    CHECK(c.facet_size() == Approx(0.5 * kSpeedOfLight / 1.9e9));
}

TEST_CASE("number formatting round-trips", "[csv]")
{
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5e-9) == "-2.5e-09");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(kMinusInfinity) == "-inf");
    CHECK(format_double(-kMinusInfinity) == "inf");
    for (double v : {1.0 / 3.0, 6.02214076e23, -1.6e-19, 1e-300, 176.05291})
        CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("csv writer quoting", "[csv]")
{
    const std::string path = temp_file("quote.csv");
    {
        CsvWriter w(path);
        w.header({"a", "b", "c"});
        w.field(std::string("plain")).field(std::string("x,y")).field(std::string("say \"hi\""));
        w.end_row();
        w.field(0.5).field(std::uint64_t{7}).field(std::string("line\nbreak"));
        w.end_row();
        w.close();
    }
    CHECK(slurp(path) == "a,b,c\nplain,\"x,y\",\"say \"\"hi\"\"\"\n0.5,7,\"line\nbreak\"\n");
    CHECK_THROWS(CsvWriter("/nonexistent/dir/x.csv"));
}

TEST_CASE("sha256 of files", "[csv]")
{
    const std::string path = temp_file("abc.txt");
    {
        std::ofstream(path, std::ios::binary) << "abc";
    }
    CHECK(sha256_file(path) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const std::string empty = temp_file("empty.txt");
    {
        std::ofstream(empty, std::ios::binary);
    }
    CHECK(sha256_file(empty) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK_THROWS(sha256_file("/nonexistent/file"));
}

TEST_CASE("trace rows carry the documented columns", "[csv]")
{
    CHECK(trace_columns().size() == 18);
    CHECK(trace_columns().front() == "timestamp_s");
    CHECK(trace_columns().back() == "tag");

    ChannelSnapshot s;
    s.time = 0.25;
    RayPath p;
    p.delay = 1e-6;
    p.doppler_hz = -3.5;
    p.transfer(kVV) = cdouble(1.0, -2.0);
    p.transfer(kHH) = cdouble(0.5, 0.0);
    s.paths.push_back(p);
    s.path_ids.push_back(3);
    const std::string path = temp_file("trace.csv");
    {
        CsvWriter w(path);
        w.header(trace_columns());
        write_trace_rows(w, s);
        w.close();
    }
    std::istringstream in(slurp(path));
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "timestamp_s,path_id,signature,delay_s,aod_az_rad,aod_el_rad,aoa_az_rad,aoa_el_rad,doppler_hz,"
                    "t_vv_re,t_vv_im,t_vh_re,t_vh_im,t_hv_re,t_hv_im,t_hh_re,t_hh_im,tag");
    CHECK(row == "0.25,3,LOS,1e-06,0,0,0,0,-3.5,1,-2,0,0,0,0,0.5,0,specular");
}

TEST_CASE("metrics and impulse-response files", "[csv]")
{
    const std::string path = temp_file("metrics.csv");
    {
        CsvWriter w(path);
        write_metrics_header(w);
        SnapshotMetrics m;
        m.time = 0.01;
        m.path_count = 2;
        m.power_vv = -70.5;
        write_metrics_row(w, m);
        w.close();
    }
    std::istringstream in(slurp(path));
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.rfind("timestamp_s,path_count,power_vv,power_hv,", 0) == 0);
    CHECK(row.rfind("0.01,2,-70.5,-inf,", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') == 13);

    TVCir cir;
    cir.times = {0.0, 0.1};
    cir.delays = {0.0, 1e-9};
    cir.values = {{cdouble(1, 0), cdouble(0, 1)}, {cdouble(2, 0), cdouble(0, 0)}};
    const std::string cpath = temp_file("cir.csv");
    write_tv_cir(cpath, cir);
    CHECK(slurp(cpath) == "delay_s,0_re,0_im,0.1_re,0.1_im\n0,1,0,2,0\n1e-09,0,1,0,0\n");
}
