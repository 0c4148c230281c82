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

#ifndef RAILCHAN_SCENARIO_HPP
#define RAILCHAN_SCENARIO_HPP

#include "railchan/dynamics.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace railchan
{

class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig
{
    std::string scene_path; // resolved against the config file directory
    double carrier_hz = 1.9e9;

    Vec3 tx_position{750.0, 20.0, 20.5};
    double tx_power_dbm = 43.0;
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;

    std::vector<Vec3> waypoints{{0.0, 0.0, 4.5}, {1700.0, 0.0, 4.5}};
    double speed_kmh = 100.0;
    double duration_s = 60.0;

    TraceLimits limits;
    double update_step_s = 0.01;
    double kf_interval_s = 0.1;
    std::vector<double> sweep_intervals_s{0.05, 0.1, 0.2, 0.5};
    double ramp_fraction = 0.5;

    ScatterPolicy scatter_policy = ScatterPolicy::Direct;
    std::optional<std::pair<double, double>> scatter_window_s;
    bool scatter_interpolate = false;
    double facet_size_wavelengths = 0.5;

    double cir_bandwidth_hz = 100e6;
    double cir_rolloff = 0.95;
    double cir_resolution_s = 1e-9;
    PolPair cir_pol = kVV;
    double cir_time_step_s = 0.1;

    std::uint64_t seed = 1;
    std::string output_dir = "railchan-out";
    int bench_repeats = 3;
    bool write_trace = true;

    CarrierConfig carrier() const { return {carrier_hz}; }
    AntennaConfig tx_antenna() const { return {tx_gain_dbi}; }
    AntennaConfig rx_antenna() const { return {rx_gain_dbi}; }
    double speed_mps() const { return speed_kmh / 3.6; }
    Trajectory trajectory() const { return {waypoints, speed_mps(), duration_s}; }
    StreamOptions stream_options(double kf_interval) const;
    double facet_size() const { return facet_size_wavelengths * carrier().wavelength(); }
};

// Configuration document: JSON text plus the directory relative paths resolve against.
// Keys are validated when config() is called; unknown keys are errors.
class ScenarioDocument
{
  public:
    static ScenarioDocument from_file(const std::string &path);
    static ScenarioDocument from_text(const std::string &text, const std::string &base_dir = ".");

    // Sets a dotted key ("trajectory.duration_s"). The value is parsed as JSON when possible and
    // taken as a plain string otherwise.
    void set(const std::string &dotted_key, const std::string &value);

    ScenarioConfig config() const;
    const std::string &text() const { return text_; }
    const std::string &base_dir() const { return base_dir_; }

  private:
    std::string text_;
    std::string base_dir_;
};

// Canonical JSON echo of a parsed configuration (all keys, defaults filled in).
std::string config_to_json(const ScenarioConfig &config, int indent = 2);

const char *to_string(ScatterPolicy p);
const char *to_string(PolPair p);

} // namespace railchan

#endif
