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

#ifndef RAILCHAN_METRICS_HPP
#define RAILCHAN_METRICS_HPP

#include "railchan/dynamics.hpp"

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace railchan
{

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();
inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

// Coherent sum of one transfer entry over paths.
cdouble narrowband_sum(std::span<const RayPath> paths, PolPair pol);

// tx_power + 20 log10 |sum|, or kMinusInfinity for an empty set or perfect cancellation.
double narrowband_power(std::span<const RayPath> paths, PolPair pol, double tx_power_dbm);

struct DelayStats
{
    double mean = kUndefined;   // s
    double spread = kUndefined; // s
};

struct AngleStats
{
    double mean_haoa = kUndefined;   // rad, circular mean
    double haoa_spread = kUndefined; // rad, sqrt(-2 ln R)
    double mean_vaoa = kUndefined;   // rad
    double vaoa_spread = kUndefined; // rad
};

struct DopplerStats
{
    double mean = kUndefined;   // Hz
    double spread = kUndefined; // Hz
};

// Statistics weighted by the per-path power |T|_F^2; undefined (NaN) for empty sets.
DelayStats delay_stats(std::span<const RayPath> paths);
AngleStats angle_stats(std::span<const RayPath> paths);
DopplerStats doppler_stats(std::span<const RayPath> paths);

struct SnapshotMetrics
{
    double time = 0.0;
    std::size_t path_count = 0;
    double power_vv = kMinusInfinity, power_hv = kMinusInfinity, power_hh = kMinusInfinity, power_vh = kMinusInfinity; // dBm
    double mean_delay = kUndefined, delay_spread = kUndefined;
    double mean_haoa = kUndefined, haoa_spread = kUndefined;
    double mean_vaoa = kUndefined, vaoa_spread = kUndefined;
    double mean_doppler = kUndefined, doppler_spread = kUndefined;
};

SnapshotMetrics compute_metrics(double time, std::span<const RayPath> paths, double tx_power_dbm);

enum class MetricKind
{
    Power,
    Delay,
    Angle,
    CircularAngle,
    Doppler,
};

struct MetricInfo
{
    const char *name;
    const char *unit;
    MetricKind kind;
    double SnapshotMetrics::*field;
};

inline constexpr std::size_t kMetricCount = 12;
const std::array<MetricInfo, kMetricCount> &metric_table();

// Inter-quantile gap below which a normalisation is flagged degenerate.
double degenerate_threshold(MetricKind kind);

// Linear-interpolation quantile of unsorted samples (p in [0, 1]); NaN when empty.
double quantile(std::vector<double> samples, double p);

inline constexpr std::array<double, 13> kCdfLevels{0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};

struct MetricError
{
    std::string name;
    std::string unit;
    std::size_t samples = 0; // timestamps with finite values in both streams
    double rmse = 0.0;
    double q10 = kUndefined, q90 = kUndefined; // of the reference series
    double nrmse = kUndefined;
    bool degenerate = false;
    std::vector<double> abs_errors; // sorted ascending
    std::array<double, kCdfLevels.size()> cdf{};
};

struct ErrorReport
{
    std::vector<MetricError> metrics;
    double reference_seconds = 0.0;
    double test_seconds = 0.0;
    double normalized_time = kUndefined;

    const MetricError &metric(const std::string &name) const;
};

// Errors of `test` against `reference` on identical timestamps; normalisation by Q90 - Q10 of
// the reference. Throws std::invalid_argument on a timestamp mismatch.
ErrorReport compare_streams(std::span<const SnapshotMetrics> reference, std::span<const SnapshotMetrics> test);

// Unit-peak raised-cosine impulse response with symbol time 1/bandwidth, truncated at +-10/bandwidth.
double raised_cosine(double tau, double bandwidth, double rolloff);

struct TVCir
{
    PolPair pol = kVV;
    std::vector<double> times;  // s
    std::vector<double> delays; // s, uniform
    std::vector<std::vector<cdouble>> values; // [time][delay]
};

struct CirOptions
{
    double bandwidth = 100e6;
    double rolloff = 0.95;
    double resolution = 1e-9; // must not exceed 1 / (2 bandwidth)
    PolPair pol = kVV;
    double max_delay = 0.0;   // grid end; 0 picks max path delay + pulse support
};

using PathFilter = std::function<bool(const RayPath &)>;

TVCir synthesize_tv_cir(std::span<const ChannelSnapshot> snapshots, const CirOptions &options, const PathFilter &filter = {});

struct PowerSample
{
    double time = 0.0;
    double specular_dbm = kMinusInfinity;
    double scatter_dbm = kMinusInfinity;
    double total_dbm = kMinusInfinity;
};

struct PowerDecomposition
{
    std::vector<PowerSample> series;
    double mean_specular_mw = 0.0, mean_scatter_mw = 0.0, mean_total_mw = 0.0;
    double specular_fraction = kUndefined, scatter_fraction = kUndefined;
};

PowerDecomposition power_decomposition(std::span<const ChannelSnapshot> snapshots, PolPair pol, double tx_power_dbm);

} // namespace railchan

#endif
