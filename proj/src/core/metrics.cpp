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

#include "railchan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace railchan
{

namespace
{

double power_dbm(cdouble sum, double tx_power_dbm)
{
    const double p = std::norm(sum);
    return p > 0.0 ? tx_power_dbm + 10.0 * std::log10(p) : kMinusInfinity;
}

double dbm_to_mw(double dbm) { return std::isfinite(dbm) ? std::pow(10.0, dbm / 10.0) : 0.0; }

template <class Value> std::pair<double, double> weighted_moments(std::span<const RayPath> paths, Value value)
{
    double w = 0.0, m1 = 0.0;
    for (const auto &p : paths)
    {
        const double pw = p.transfer.frobenius2();
        w += pw;
        m1 += pw * value(p);
    }
    if (!(w > 0.0))
        return {kUndefined, kUndefined};
    const double mean = m1 / w;
    double m2 = 0.0;
    for (const auto &p : paths)
    {
        const double d = value(p) - mean;
        m2 += p.transfer.frobenius2() * d * d;
    }
    return {mean, std::sqrt(m2 / w)};
}

} // namespace

cdouble narrowband_sum(std::span<const RayPath> paths, PolPair pol)
{
    cdouble s = 0.0;
    for (const auto &p : paths)
        s += p.transfer(pol);
    return s;
}

double narrowband_power(std::span<const RayPath> paths, PolPair pol, double tx_power_dbm)
{
    return power_dbm(narrowband_sum(paths, pol), tx_power_dbm);
}

DelayStats delay_stats(std::span<const RayPath> paths)
{
    const auto [mean, spread] = weighted_moments(paths, [](const RayPath &p) { return p.delay; });
    return {mean, spread};
}

AngleStats angle_stats(std::span<const RayPath> paths)
{
    AngleStats s;
    double w = 0.0;
    cdouble phasor = 0.0;
    for (const auto &p : paths)
    {
        const double pw = p.transfer.frobenius2();
        w += pw;
        phasor += pw * std::polar(1.0, p.aoa.azimuth);
    }
    if (!(w > 0.0))
        return s;
    // Resultants at rounding level carry no direction.
    const double r = std::min(1.0, std::abs(phasor) / w);
    if (r > 1e-12)
    {
        s.mean_haoa = std::arg(phasor);
        s.haoa_spread = std::sqrt(-2.0 * std::log(r));
    }
    const auto [mean, spread] = weighted_moments(paths, [](const RayPath &p) { return p.aoa.elevation; });
    s.mean_vaoa = mean;
    s.vaoa_spread = spread;
    return s;
}

DopplerStats doppler_stats(std::span<const RayPath> paths)
{
    const auto [mean, spread] = weighted_moments(paths, [](const RayPath &p) { return p.doppler_hz; });
    return {mean, spread};
}

SnapshotMetrics compute_metrics(double time, std::span<const RayPath> paths, double tx_power_dbm)
{
    SnapshotMetrics m;
    m.time = time;
    m.path_count = paths.size();
    m.power_vv = narrowband_power(paths, kVV, tx_power_dbm);
    m.power_hv = narrowband_power(paths, kHV, tx_power_dbm);
    m.power_hh = narrowband_power(paths, kHH, tx_power_dbm);
    m.power_vh = narrowband_power(paths, kVH, tx_power_dbm);
    const DelayStats d = delay_stats(paths);
    m.mean_delay = d.mean;
    m.delay_spread = d.spread;
    const AngleStats a = angle_stats(paths);
    m.mean_haoa = a.mean_haoa;
    m.haoa_spread = a.haoa_spread;
    m.mean_vaoa = a.mean_vaoa;
    m.vaoa_spread = a.vaoa_spread;
    const DopplerStats f = doppler_stats(paths);
    m.mean_doppler = f.mean;
    m.doppler_spread = f.spread;
    return m;
}

const std::array<MetricInfo, kMetricCount> &metric_table()
{
    static const std::array<MetricInfo, kMetricCount> table{{
        {"power_vv", "dBm", MetricKind::Power, &SnapshotMetrics::power_vv},
        {"power_hv", "dBm", MetricKind::Power, &SnapshotMetrics::power_hv},
        {"power_hh", "dBm", MetricKind::Power, &SnapshotMetrics::power_hh},
        {"power_vh", "dBm", MetricKind::Power, &SnapshotMetrics::power_vh},
        {"mean_delay", "s", MetricKind::Delay, &SnapshotMetrics::mean_delay},
        {"delay_spread", "s", MetricKind::Delay, &SnapshotMetrics::delay_spread},
        {"mean_haoa", "rad", MetricKind::CircularAngle, &SnapshotMetrics::mean_haoa},
        {"haoa_spread", "rad", MetricKind::Angle, &SnapshotMetrics::haoa_spread},
        {"mean_vaoa", "rad", MetricKind::Angle, &SnapshotMetrics::mean_vaoa},
        {"vaoa_spread", "rad", MetricKind::Angle, &SnapshotMetrics::vaoa_spread},
        {"mean_doppler", "Hz", MetricKind::Doppler, &SnapshotMetrics::mean_doppler},
        {"doppler_spread", "Hz", MetricKind::Doppler, &SnapshotMetrics::doppler_spread},
    }};
    return table;
}

double degenerate_threshold(MetricKind kind)
{
    switch (kind)
    {
    case MetricKind::Power:
        return 0.1;
    case MetricKind::Delay:
        return 1e-9;
    case MetricKind::Angle:
    case MetricKind::CircularAngle:
        return 2.0 * kPi / 180.0;
    case MetricKind::Doppler:
        return 1.0;
    }
    return 0.0;
}

double quantile(std::vector<double> samples, double p)
{
    if (samples.empty())
        return kUndefined;
    std::sort(samples.begin(), samples.end());
    const double h = (static_cast<double>(samples.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

const MetricError &ErrorReport::metric(const std::string &name) const
{
    for (const auto &m : metrics)
        if (m.name == name)
            return m;
    throw std::out_of_range("no metric named " + name);
}

ErrorReport compare_streams(std::span<const SnapshotMetrics> reference, std::span<const SnapshotMetrics> test)
{
    if (reference.size() != test.size())
        throw std::invalid_argument("compare_streams: streams differ in length");
    for (std::size_t i = 0; i < reference.size(); ++i)
        if (std::abs(reference[i].time - test[i].time) > 1e-12)
            throw std::invalid_argument("compare_streams: timestamp mismatch at index " + std::to_string(i));

    ErrorReport report;
    for (const MetricInfo &info : metric_table())
    {
        MetricError e;
        e.name = info.name;
        e.unit = info.unit;
        std::vector<double> ref_values;
        double sum2 = 0.0;
        for (std::size_t i = 0; i < reference.size(); ++i)
        {
            const double r = reference[i].*info.field, t = test[i].*info.field;
            if (std::isfinite(r))
                ref_values.push_back(r);
            if (!std::isfinite(r) || !std::isfinite(t))
                continue;
            double err = t - r;
            if (info.kind == MetricKind::CircularAngle)
                err = wrap_angle(err);
            sum2 += err * err;
            e.abs_errors.push_back(std::abs(err));
        }
        e.samples = e.abs_errors.size();
        e.rmse = e.samples > 0 ? std::sqrt(sum2 / static_cast<double>(e.samples)) : kUndefined;
        e.q10 = quantile(ref_values, 0.1);
        e.q90 = quantile(ref_values, 0.9);
        const double gap = e.q90 - e.q10;
        e.degenerate = !(gap >= degenerate_threshold(info.kind));
        if (e.samples > 0)
        {
            if (gap > 0.0)
                e.nrmse = e.rmse / gap;
            else
                e.nrmse = e.rmse == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        std::sort(e.abs_errors.begin(), e.abs_errors.end());
        for (std::size_t k = 0; k < kCdfLevels.size(); ++k)
            e.cdf[k] = quantile(e.abs_errors, kCdfLevels[k]);
        report.metrics.push_back(std::move(e));
    }
    return report;
}

double raised_cosine(double tau, double bandwidth, double rolloff)
{
    const double T = 1.0 / bandwidth;
    const double x = tau / T;
    if (std::abs(x) > 10.0)
        return 0.0;
    const double sinc = x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
    const double d = 2.0 * rolloff * x;
    if (std::abs(1.0 - d * d) < 1e-10)
    {
        const double s = std::sin(kPi / (2.0 * rolloff)) / (kPi / (2.0 * rolloff));
        return kPi / 4.0 * s;
    }
    return sinc * std::cos(kPi * rolloff * x) / (1.0 - d * d);
}

TVCir synthesize_tv_cir(std::span<const ChannelSnapshot> snapshots, const CirOptions &options, const PathFilter &filter)
{
    if (!(options.bandwidth > 0.0) || options.rolloff < 0.0 || options.rolloff > 1.0)
        throw std::invalid_argument("tv-cir: invalid bandwidth or roll-off");
    if (!(options.resolution > 0.0) || options.resolution > 1.0 / (2.0 * options.bandwidth) * (1.0 + 1e-12))
        throw std::invalid_argument("tv-cir: delay resolution coarser than 1/(2 bandwidth)");
    const double support = 10.0 / options.bandwidth;
    double max_delay = options.max_delay;
    if (max_delay <= 0.0)
    {
        for (const auto &s : snapshots)
            for (const auto &p : s.paths)
                max_delay = std::max(max_delay, p.delay);
        max_delay += support;
    }
    const std::size_t bins = static_cast<std::size_t>(std::ceil(max_delay / options.resolution)) + 1;

    TVCir cir;
    cir.pol = options.pol;
    cir.delays.resize(bins);
    for (std::size_t i = 0; i < bins; ++i)
        cir.delays[i] = static_cast<double>(i) * options.resolution;
    cir.times.reserve(snapshots.size());
    cir.values.assign(snapshots.size(), std::vector<cdouble>(bins));
    for (std::size_t s = 0; s < snapshots.size(); ++s)
    {
        cir.times.push_back(snapshots[s].time);
        auto &row = cir.values[s];
        for (const auto &p : snapshots[s].paths)
        {
            if (filter && !filter(p))
                continue;
            const cdouble a = p.transfer(options.pol);
            const double lo = std::max(0.0, std::ceil((p.delay - support) / options.resolution));
            const double hi = std::min(static_cast<double>(bins - 1), std::floor((p.delay + support) / options.resolution));
            for (auto i = static_cast<std::size_t>(lo); static_cast<double>(i) <= hi; ++i)
                row[i] += a * raised_cosine(cir.delays[i] - p.delay, options.bandwidth, options.rolloff);
        }
    }
    return cir;
}

PowerDecomposition power_decomposition(std::span<const ChannelSnapshot> snapshots, PolPair pol, double tx_power_dbm)
{
    PowerDecomposition out;
    out.series.reserve(snapshots.size());
    for (const auto &s : snapshots)
    {
        cdouble spec = 0.0, scat = 0.0, total = 0.0;
        for (const auto &p : s.paths)
        {
            const cdouble a = p.transfer(pol);
            (p.tag == PathTag::Scatter ? scat : spec) += a;
            total += a;
        }
        PowerSample ps{s.time, power_dbm(spec, tx_power_dbm), power_dbm(scat, tx_power_dbm), power_dbm(total, tx_power_dbm)};
        out.mean_specular_mw += dbm_to_mw(ps.specular_dbm);
        out.mean_scatter_mw += dbm_to_mw(ps.scatter_dbm);
        out.mean_total_mw += dbm_to_mw(ps.total_dbm);
        out.series.push_back(ps);
    }
    if (!snapshots.empty())
    {
        const double n = static_cast<double>(snapshots.size());
        out.mean_specular_mw /= n;
        out.mean_scatter_mw /= n;
        out.mean_total_mw /= n;
        if (out.mean_total_mw > 0.0)
        {
            out.specular_fraction = out.mean_specular_mw / out.mean_total_mw;
            out.scatter_fraction = out.mean_scatter_mw / out.mean_total_mw;
        }
    }
    return out;
}

} // namespace railchan
