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

#include "railchan/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace railchan
{

namespace
{

using json = nlohmann::json;

std::string join(const std::string &where, const std::string &key) { return where.empty() ? key : where + "." + key; }

void reject_unknown_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where)
{
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto &[key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(join(where, key) + ": unknown key");
}

double number(const json &obj, const std::string &key, const std::string &where, double fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json &v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(join(where, key) + ": expected a number");
    return v.get<double>();
}

bool boolean(const json &obj, const std::string &key, const std::string &where, bool fallback)
{
    if (!obj.contains(key))
        return fallback;
    if (!obj.at(key).is_boolean())
        throw ConfigError(join(where, key) + ": expected true or false");
    return obj.at(key).get<bool>();
}

std::string string_value(const json &obj, const std::string &key, const std::string &where, const std::string &fallback)
{
    if (!obj.contains(key))
        return fallback;
    if (!obj.at(key).is_string())
        throw ConfigError(join(where, key) + ": expected a string");
    return obj.at(key).get<std::string>();
}

Vec3 point3(const json &v, const std::string &where)
{
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
        throw ConfigError(where + ": expected [x, y, z]");
    const Vec3 p{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    if (!is_finite(p))
        throw ConfigError(where + ": non-finite coordinate");
    return p;
}

void require(bool ok, const std::string &where, const std::string &what)
{
    if (!ok)
        throw ConfigError(where + ": " + what);
}

bool integer_multiple(double value, double step)
{
    const double r = std::round(value / step);
    return r >= 1.0 && std::abs(r * step - value) <= 1e-9 * std::max(value, step);
}

ScatterPolicy parse_policy(const std::string &s, const std::string &where)
{
    if (s == "off")
        return ScatterPolicy::Off;
    if (s == "direct")
        return ScatterPolicy::Direct;
    if (s == "direct+reflection")
        return ScatterPolicy::DirectAndReflection;
    throw ConfigError(where + ": expected one of off, direct, direct+reflection");
}

PolPair parse_pol(const std::string &s, const std::string &where)
{
    if (s == "VV")
        return kVV;
    if (s == "VH")
        return kVH;
    if (s == "HV")
        return kHV;
    if (s == "HH")
        return kHH;
    throw ConfigError(where + ": expected one of VV, VH, HV, HH");
}

json parse_json(const std::string &text, const std::string &what)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError(what + ": " + e.what());
    }
}

} // namespace

const char *to_string(ScatterPolicy p)
{
    switch (p)
    {
    case ScatterPolicy::Off:
        return "off";
    case ScatterPolicy::Direct:
        return "direct";
    case ScatterPolicy::DirectAndReflection:
        return "direct+reflection";
    }
    return "?";
}

const char *to_string(PolPair p)
{
    static const char *names[2][2] = {{"VV", "VH"}, {"HV", "HH"}};
    return names[static_cast<int>(p.rx)][static_cast<int>(p.tx)];
}

StreamOptions ScenarioConfig::stream_options(double kf_interval) const
{
    StreamOptions o;
    o.update_step = update_step_s;
    o.kf_interval = kf_interval;
    o.ramp_fraction = ramp_fraction;
    o.seed = seed;
    o.interpolate_scatter = scatter_interpolate;
    o.scatter_window = scatter_window_s;
    return o;
}

ScenarioDocument ScenarioDocument::from_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    return from_text(ss.str(), dir.empty() ? "." : dir.string());
}

ScenarioDocument ScenarioDocument::from_text(const std::string &text, const std::string &base_dir)
{
    const json doc = parse_json(text, "config");
    if (!doc.is_object())
        throw ConfigError("config: expected a JSON object");
    ScenarioDocument d;
    d.text_ = doc.dump(2);
    d.base_dir_ = base_dir;
    return d;
}

void ScenarioDocument::set(const std::string &dotted_key, const std::string &value)
{
    if (dotted_key.empty())
        throw ConfigError("override: empty key");
    json doc = parse_json(text_, "config");
    json *node = &doc;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t dot = dotted_key.find('.', start);
        const std::string part = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty())
            throw ConfigError("override '" + dotted_key + "': empty key component");
        if (dot == std::string::npos)
        {
            json v;
            try
            {
                v = json::parse(value);
            }
            catch (const json::parse_error &)
            {
                v = value;
            }
            (*node)[part] = v;
            break;
        }
        json &child = (*node)[part];
        if (child.is_null())
            child = json::object();
        if (!child.is_object())
            throw ConfigError("override '" + dotted_key + "': '" + part + "' is not an object");
        node = &child;
        start = dot + 1;
    }
    text_ = doc.dump(2);
}

ScenarioConfig ScenarioDocument::config() const
{
    const json doc = parse_json(text_, "config");
    reject_unknown_keys(doc,
                        {"version", "scene", "carrier_hz", "tx", "rx", "trajectory", "limits", "update_step_s", "kf_interval_s",
                         "sweep_intervals_s", "ramp_fraction", "scatter", "cir", "seed", "output_dir", "bench_repeats", "write_trace"},
                        "config");
    require(doc.contains("version"), "config.version", "missing (required)");
    require(doc.at("version") == 1, "config.version", "unsupported version " + doc.at("version").dump());

    ScenarioConfig c;
    const std::string scene = string_value(doc, "scene", "config", "");
    if (!scene.empty())
    {
        const std::filesystem::path p(scene);
        c.scene_path = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir_) / p).lexically_normal().string();
    }
    c.carrier_hz = number(doc, "carrier_hz", "config", c.carrier_hz);
    require(c.carrier_hz > 0.0, "config.carrier_hz", "must be positive");

    if (doc.contains("tx"))
    {
        const json &tx = doc.at("tx");
        reject_unknown_keys(tx, {"position", "power_dbm", "gain_dbi"}, "config.tx");
        if (tx.contains("position"))
            c.tx_position = point3(tx.at("position"), "config.tx.position");
        c.tx_power_dbm = number(tx, "power_dbm", "config.tx", c.tx_power_dbm);
        c.tx_gain_dbi = number(tx, "gain_dbi", "config.tx", c.tx_gain_dbi);
    }
    if (doc.contains("rx"))
    {
        const json &rx = doc.at("rx");
        reject_unknown_keys(rx, {"gain_dbi"}, "config.rx");
        c.rx_gain_dbi = number(rx, "gain_dbi", "config.rx", c.rx_gain_dbi);
    }
    if (doc.contains("trajectory"))
    {
        const json &t = doc.at("trajectory");
        reject_unknown_keys(t, {"waypoints", "speed_kmh", "duration_s"}, "config.trajectory");
        if (t.contains("waypoints"))
        {
            const json &w = t.at("waypoints");
            require(w.is_array() && w.size() >= 2, "config.trajectory.waypoints", "expected at least two [x, y, z] points");
            c.waypoints.clear();
            for (std::size_t i = 0; i < w.size(); ++i)
                c.waypoints.push_back(point3(w[i], "config.trajectory.waypoints[" + std::to_string(i) + "]"));
        }
        c.speed_kmh = number(t, "speed_kmh", "config.trajectory", c.speed_kmh);
        c.duration_s = number(t, "duration_s", "config.trajectory", c.duration_s);
    }
    require(c.speed_kmh > 0.0, "config.trajectory.speed_kmh", "must be positive");
    require(c.duration_s > 0.0, "config.trajectory.duration_s", "must be positive");
    try
    {
        (void)c.trajectory();
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(std::string("config.trajectory: ") + e.what());
    }

    if (doc.contains("limits"))
    {
        const json &l = doc.at("limits");
        reject_unknown_keys(l, {"max_reflections", "max_vertical_diffractions", "rooftop", "loss_floor_db"}, "config.limits");
        c.limits.max_reflections = static_cast<int>(number(l, "max_reflections", "config.limits", c.limits.max_reflections));
        c.limits.max_vertical_diffractions =
            static_cast<int>(number(l, "max_vertical_diffractions", "config.limits", c.limits.max_vertical_diffractions));
        c.limits.rooftop = boolean(l, "rooftop", "config.limits", c.limits.rooftop);
        c.limits.loss_floor_db = number(l, "loss_floor_db", "config.limits", c.limits.loss_floor_db);
    }
    require(c.limits.max_reflections >= 0 && c.limits.max_reflections <= 2, "config.limits.max_reflections", "must be 0, 1 or 2");
    require(c.limits.max_vertical_diffractions >= 0 && c.limits.max_vertical_diffractions <= 1,
            "config.limits.max_vertical_diffractions", "must be 0 or 1");
    require(c.limits.loss_floor_db > 0.0, "config.limits.loss_floor_db", "must be positive");

    c.update_step_s = number(doc, "update_step_s", "config", c.update_step_s);
    require(c.update_step_s > 0.0, "config.update_step_s", "must be positive");
    require(integer_multiple(c.duration_s, c.update_step_s), "config.trajectory.duration_s", "must be an integer number of update steps");
    c.kf_interval_s = number(doc, "kf_interval_s", "config", c.kf_interval_s);
    require(integer_multiple(c.kf_interval_s, c.update_step_s), "config.kf_interval_s",
            "must be a positive integer multiple of update_step_s");
    if (doc.contains("sweep_intervals_s"))
    {
        const json &s = doc.at("sweep_intervals_s");
        require(s.is_array() && !s.empty(), "config.sweep_intervals_s", "expected a nonempty list of numbers");
        c.sweep_intervals_s.clear();
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            const std::string where = "config.sweep_intervals_s[" + std::to_string(i) + "]";
            require(s[i].is_number(), where, "expected a number");
            c.sweep_intervals_s.push_back(s[i].get<double>());
        }
    }
    for (std::size_t i = 0; i < c.sweep_intervals_s.size(); ++i)
        require(integer_multiple(c.sweep_intervals_s[i], c.update_step_s), "config.sweep_intervals_s[" + std::to_string(i) + "]",
                "must be a positive integer multiple of update_step_s");
    c.ramp_fraction = number(doc, "ramp_fraction", "config", c.ramp_fraction);
    require(c.ramp_fraction >= 0.0 && c.ramp_fraction <= 1.0, "config.ramp_fraction", "must lie in [0, 1]");

    if (doc.contains("scatter"))
    {
        const json &s = doc.at("scatter");
        reject_unknown_keys(s, {"policy", "window_s", "interpolate", "facet_size_wavelengths"}, "config.scatter");
        c.scatter_policy = parse_policy(string_value(s, "policy", "config.scatter", to_string(c.scatter_policy)), "config.scatter.policy");
        if (s.contains("window_s") && !s.at("window_s").is_null())
        {
            const json &w = s.at("window_s");
            require(w.is_array() && w.size() == 2 && w[0].is_number() && w[1].is_number(), "config.scatter.window_s",
                    "expected [start, end] in seconds");
            c.scatter_window_s = std::make_pair(w[0].get<double>(), w[1].get<double>());
            require(c.scatter_window_s->first >= 0.0 && c.scatter_window_s->first < c.scatter_window_s->second,
                    "config.scatter.window_s", "must satisfy 0 <= start < end");
        }
        c.scatter_interpolate = boolean(s, "interpolate", "config.scatter", c.scatter_interpolate);
        c.facet_size_wavelengths = number(s, "facet_size_wavelengths", "config.scatter", c.facet_size_wavelengths);
    }
    require(c.facet_size_wavelengths > 0.0, "config.scatter.facet_size_wavelengths", "must be positive");

    if (doc.contains("cir"))
    {
        const json &s = doc.at("cir");
        reject_unknown_keys(s, {"bandwidth_hz", "rolloff", "resolution_s", "pol", "time_step_s"}, "config.cir");
        c.cir_bandwidth_hz = number(s, "bandwidth_hz", "config.cir", c.cir_bandwidth_hz);
        c.cir_rolloff = number(s, "rolloff", "config.cir", c.cir_rolloff);
        c.cir_resolution_s = number(s, "resolution_s", "config.cir", c.cir_resolution_s);
        c.cir_pol = parse_pol(string_value(s, "pol", "config.cir", to_string(c.cir_pol)), "config.cir.pol");
        c.cir_time_step_s = number(s, "time_step_s", "config.cir", c.cir_time_step_s);
    }
    require(c.cir_bandwidth_hz > 0.0, "config.cir.bandwidth_hz", "must be positive");
    require(c.cir_rolloff >= 0.0 && c.cir_rolloff <= 1.0, "config.cir.rolloff", "must lie in [0, 1]");
    require(c.cir_resolution_s > 0.0 && c.cir_resolution_s <= 1.0 / (2.0 * c.cir_bandwidth_hz) * (1.0 + 1e-12), "config.cir.resolution_s",
            "must be positive and at most 1/(2 bandwidth)");
    require(integer_multiple(c.cir_time_step_s, c.update_step_s), "config.cir.time_step_s",
            "must be a positive integer multiple of update_step_s");

    if (doc.contains("seed"))
    {
        const json &s = doc.at("seed");
        require(s.is_number_integer() && s.get<long long>() >= 0, "config.seed", "expected a nonnegative integer");
        c.seed = s.get<std::uint64_t>();
    }
    c.output_dir = string_value(doc, "output_dir", "config", c.output_dir);
    require(!c.output_dir.empty(), "config.output_dir", "must not be empty");
    c.bench_repeats = static_cast<int>(number(doc, "bench_repeats", "config", c.bench_repeats));
    require(c.bench_repeats >= 1, "config.bench_repeats", "must be at least 1");
    c.write_trace = boolean(doc, "write_trace", "config", c.write_trace);
    return c;
}

std::string config_to_json(const ScenarioConfig &c, int indent)
{
    const auto p3 = [](const Vec3 &p) { return json::array({p.x, p.y, p.z}); };
    json w = json::array();
    for (const auto &p : c.waypoints)
        w.push_back(p3(p));
    json doc = {
        {"version", 1},
        {"scene", c.scene_path},
        {"carrier_hz", c.carrier_hz},
        {"tx", {{"position", p3(c.tx_position)}, {"power_dbm", c.tx_power_dbm}, {"gain_dbi", c.tx_gain_dbi}}},
        {"rx", {{"gain_dbi", c.rx_gain_dbi}}},
        {"trajectory", {{"waypoints", w}, {"speed_kmh", c.speed_kmh}, {"duration_s", c.duration_s}}},
        {"limits",
         {{"max_reflections", c.limits.max_reflections},
          {"max_vertical_diffractions", c.limits.max_vertical_diffractions},
          {"rooftop", c.limits.rooftop},
          {"loss_floor_db", c.limits.loss_floor_db}}},
        {"update_step_s", c.update_step_s},
        {"kf_interval_s", c.kf_interval_s},
        {"sweep_intervals_s", c.sweep_intervals_s},
        {"ramp_fraction", c.ramp_fraction},
        {"scatter",
         {{"policy", to_string(c.scatter_policy)},
          {"window_s", c.scatter_window_s ? json::array({c.scatter_window_s->first, c.scatter_window_s->second}) : json(nullptr)},
          {"interpolate", c.scatter_interpolate},
          {"facet_size_wavelengths", c.facet_size_wavelengths}}},
        {"cir",
         {{"bandwidth_hz", c.cir_bandwidth_hz},
          {"rolloff", c.cir_rolloff},
          {"resolution_s", c.cir_resolution_s},
          {"pol", to_string(c.cir_pol)},
          {"time_step_s", c.cir_time_step_s}}},
        {"seed", c.seed},
        {"output_dir", c.output_dir},
        {"bench_repeats", c.bench_repeats},
        {"write_trace", c.write_trace},
    };
    return doc.dump(indent);
}

} // namespace railchan
