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

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace railchan;
using Catch::Approx;

namespace
{

RayPath path(cdouble vv, double delay, double haoa = 0.0, double vaoa = 0.0, double doppler = 0.0, PathTag tag = PathTag::Specular)
{
    RayPath p;
    p.transfer(kVV) = vv;
    p.delay = delay;
    p.aoa.azimuth = haoa;
    p.aoa.elevation = vaoa;
    p.doppler_hz = doppler;
    p.tag = tag;
    return p;
}

double deg(double d) { return d * kPi / 180.0; }

std::vector<SnapshotMetrics> series(const std::vector<double> &power_vv)
{
    std::vector<SnapshotMetrics> out;
    for (std::size_t i = 0; i < power_vv.size(); ++i)
    {
        SnapshotMetrics m;
        m.time = 0.01 * static_cast<double>(i);
        m.power_vv = power_vv[i];
        out.push_back(m);
    }
    return out;
}

} // namespace

TEST_CASE("narrowband power of coherent sums", "[metrics]")
{
    const std::vector<RayPath> one{path(1e-5, 1e-6)};
    CHECK(narrowband_power(one, kVV, 43.0) == Approx(43.0 - 100.0));
    const std::vector<RayPath> two{path(1e-5, 1e-6), path(1e-5, 2e-6)};
    CHECK(narrowband_power(two, kVV, 0.0) == Approx(20.0 * std::log10(2e-5)));
    const std::vector<RayPath> cancel{path(1e-5, 1e-6), path(-1e-5, 2e-6)};
    CHECK(narrowband_power(cancel, kVV, 0.0) == kMinusInfinity);
    CHECK(narrowband_power({}, kVV, 0.0) == kMinusInfinity);
    CHECK(narrowband_power(one, kHH, 0.0) == kMinusInfinity);
}

TEST_CASE("power-weighted delay and Doppler moments", "[metrics]")
{
    // Weights 1 and 3 (Frobenius squared).
    const std::vector<RayPath> p{path(1.0, 1e-6, 0, 0, -10.0), path(std::sqrt(3.0), 3e-6, 0, 0, 30.0)};
    const DelayStats d = delay_stats(p);
    CHECK(d.mean == Approx(2.5e-6));
    CHECK(d.spread == Approx(std::sqrt(0.75) * 1e-6));
    const DopplerStats f = doppler_stats(p);
    CHECK(f.mean == Approx(20.0));
    CHECK(f.spread == Approx(std::sqrt(300.0)));

    const std::vector<RayPath> single{path(1.0, 4e-6)};
    CHECK(delay_stats(single).spread == 0.0);
    CHECK(std::isnan(delay_stats({}).mean));
    CHECK(std::isnan(doppler_stats({}).spread));

    // All four polarisation entries enter the weight.
    RayPath cross = path(0.0, 5e-6);
    cross.transfer(kHV) = 1.0;
    const std::vector<RayPath> mixed{path(1.0, 1e-6), cross};
    CHECK(delay_stats(mixed).mean == Approx(3e-6));
}

TEST_CASE("circular azimuth statistics", "[metrics]")
{
    const std::vector<RayPath> wrap{path(1.0, 0, deg(170)), path(1.0, 0, deg(-170))};
    const AngleStats a = angle_stats(wrap);
    CHECK(std::abs(std::abs(a.mean_haoa) - kPi) < 1e-12);
    const double r = std::cos(deg(10));
    CHECK(a.haoa_spread == Approx(std::sqrt(-2.0 * std::log(r))));

    const std::vector<RayPath> same{path(1.0, 0, 0.3, 0.1), path(2.0, 0, 0.3, 0.1)};
    const AngleStats s = angle_stats(same);
    CHECK(s.mean_haoa == Approx(0.3));
    CHECK(s.haoa_spread == Approx(0.0).margin(1e-7));
    CHECK(s.mean_vaoa == Approx(0.1));
    CHECK(s.vaoa_spread == Approx(0.0).margin(1e-12));

    const std::vector<RayPath> opposite{path(1.0, 0, 0.0), path(1.0, 0, kPi)};
    CHECK(std::isnan(angle_stats(opposite).haoa_spread));
    CHECK(std::isnan(angle_stats(opposite).mean_haoa));

    const std::vector<RayPath> elev{path(1.0, 0, 0, deg(-10)), path(1.0, 0, 0, deg(30))};
    CHECK(angle_stats(elev).mean_vaoa == Approx(deg(10)));
    CHECK(angle_stats(elev).vaoa_spread == Approx(deg(20)));
}

TEST_CASE("snapshot metrics and the metric table", "[metrics]")
{
    const auto &t = metric_table();
    const char *names[] = {"power_vv", "power_hv", "power_hh", "power_vh", "mean_delay", "delay_spread",
                           "mean_haoa", "haoa_spread", "mean_vaoa", "vaoa_spread", "mean_doppler", "doppler_spread"};
    for (std::size_t i = 0; i < kMetricCount; ++i)
        CHECK(std::string(t[i].name) == names[i]);

    const std::vector<RayPath> p{path(1e-4, 2e-6, 0.5, 0.0, 12.0)};
    const SnapshotMetrics m = compute_metrics(1.5, p, 40.0);
    CHECK(m.time == 1.5);
    CHECK(m.path_count == 1);
    CHECK(m.power_vv == Approx(-40.0));
    CHECK(m.power_hh == kMinusInfinity);
    CHECK(m.mean_delay == Approx(2e-6));
    CHECK(m.mean_haoa == Approx(0.5));
    CHECK(m.mean_doppler == Approx(12.0));

    const SnapshotMetrics empty = compute_metrics(0.0, {}, 40.0);
    CHECK(empty.power_vv == kMinusInfinity);
    CHECK(std::isnan(empty.delay_spread));
}

TEST_CASE("linear-interpolation quantiles", "[metrics]")
{
    const std::vector<double> v{5, 1, 4, 2, 3};
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 5.0);
    CHECK(quantile(v, 0.5) == 3.0);
    CHECK(quantile(v, 0.1) == Approx(1.4));
    CHECK(quantile(v, 0.9) == Approx(4.6));
    CHECK(quantile({7.0}, 0.3) == 7.0);
    CHECK(std::isnan(quantile({}, 0.5)));
}

TEST_CASE("stream comparison and normalisation", "[metrics]")
{
    std::vector<double> ref_power, test_power;
    for (int i = 0; i <= 10; ++i)
    {
        ref_power.push_back(-60.0 + i);
        test_power.push_back(-60.0 + i + (i % 2 ? 0.5 : -0.5));
    }
    const auto ref = series(ref_power);
    const auto test = series(test_power);
    const ErrorReport r = compare_streams(ref, test);
    REQUIRE(r.metrics.size() == kMetricCount);
    for (std::size_t i = 0; i < kMetricCount; ++i)
        CHECK(r.metrics[i].name == metric_table()[i].name);
    const MetricError &vv = r.metric("power_vv");
    CHECK(vv.samples == 11);
    CHECK(vv.rmse == Approx(0.5));
    CHECK(vv.q10 == Approx(-59.0));
    CHECK(vv.q90 == Approx(-51.0));
    CHECK(vv.nrmse == Approx(0.5 / 8.0));
    CHECK_FALSE(vv.degenerate);
    CHECK(vv.cdf[6] == Approx(0.5));

    // -inf samples are skipped on either side; undefined metrics carry no samples.
    auto holes = test;
    holes[3].power_vv = kMinusInfinity;
    CHECK(compare_streams(ref, holes).metric("power_vv").samples == 10);
    CHECK(r.metric("mean_delay").samples == 0);
    CHECK(std::isnan(r.metric("mean_delay").nrmse));
    CHECK(r.metric("mean_delay").degenerate);

    // Self-comparison gives zero error even for a constant reference.
    const auto flat = series(std::vector<double>(11, -70.0));
    const ErrorReport self = compare_streams(flat, flat);
    CHECK(self.metric("power_vv").nrmse == 0.0);
    CHECK(self.metric("power_vv").degenerate);

    const auto shifted = series(std::vector<double>(11, -69.0));
    CHECK(std::isinf(compare_streams(flat, shifted).metric("power_vv").nrmse));

    // Degenerate below the metric threshold.
    const auto tiny = series({-70.0, -70.05, -70.0, -70.05, -70.0, -70.05, -70.0, -70.05, -70.0, -70.05, -70.0});
    CHECK(compare_streams(tiny, tiny).metric("power_vv").degenerate);

    auto late = test;
    late[4].time += 1e-3;
    CHECK_THROWS_AS(compare_streams(ref, late), std::invalid_argument);
    CHECK_THROWS_AS(compare_streams(ref, std::span(test).first(5)), std::invalid_argument);
    CHECK_THROWS(r.metric("nope"));
}

TEST_CASE("circular errors wrap", "[metrics]")
{
    std::vector<SnapshotMetrics> a(3), b(3);
    for (int i = 0; i < 3; ++i)
    {
        a[i].time = b[i].time = i;
        a[i].mean_haoa = deg(179);
        b[i].mean_haoa = deg(-179);
    }
    CHECK(compare_streams(a, b).metric("mean_haoa").rmse == Approx(deg(2)));
}

TEST_CASE("degenerate thresholds", "[metrics]")
{
    CHECK(degenerate_threshold(MetricKind::Power) == 0.1);
    CHECK(degenerate_threshold(MetricKind::Delay) == 1e-9);
    CHECK(degenerate_threshold(MetricKind::Angle) == Approx(deg(2)));
    CHECK(degenerate_threshold(MetricKind::Doppler) == 1.0);
}

TEST_CASE("raised-cosine pulse", "[metrics][cir]")
{
    const double B = 100e6, beta = 0.95, T = 1.0 / B;
    CHECK(raised_cosine(0.0, B, beta) == 1.0);
    for (int n = 1; n <= 9; ++n)
    {
        CHECK(raised_cosine(n * T, B, beta) == Approx(0.0).margin(1e-12));
        CHECK(raised_cosine(-n * T, B, beta) == Approx(0.0).margin(1e-12));
    }
    CHECK(raised_cosine(0.37 * T, B, beta) == raised_cosine(-0.37 * T, B, beta));
    CHECK(raised_cosine(10.5 * T, B, beta) == 0.0);
    // Removable singularity at tau = T / (2 beta).
    const double ts = T / (2.0 * beta);
    const double at = raised_cosine(ts, B, beta);
    CHECK(at == Approx(raised_cosine(ts * (1 + 1e-6), B, beta)).epsilon(1e-4));
    CHECK(at == Approx(raised_cosine(ts * (1 - 1e-6), B, beta)).epsilon(1e-4));
    // Zero roll-off reduces to sinc.
    CHECK(raised_cosine(0.5 * T, B, 0.0) == Approx(2.0 / kPi));
}

TEST_CASE("time-variant impulse response synthesis", "[metrics][cir]")
{
    std::vector<ChannelSnapshot> snaps(2);
    snaps[0].time = 0.0;
    snaps[0].paths = {path(1.0, 200e-9), path(cdouble(0.0, 0.5), 260e-9, 0, 0, 0, PathTag::Scatter)};
    snaps[1].time = 0.01;
    snaps[1].paths = {path(2.0, 201.5e-9)};

    CirOptions o;
    o.bandwidth = 100e6;
    o.resolution = 1e-9;
    const TVCir cir = synthesize_tv_cir(snaps, o);
    REQUIRE(cir.times.size() == 2);
    CHECK(cir.delays[1] - cir.delays[0] == Approx(1e-9));
    CHECK(cir.delays.back() >= 260e-9 + 100e-9 - 1e-9);
    CHECK(std::abs(cir.values[0][200] - 1.0) < 1e-9);
    CHECK(std::abs(cir.values[0][260] - cdouble(0.0, 0.5)) < 1e-9);
    CHECK(std::abs(cir.values[0][150]) < 1e-12);
    // Off-grid delay: peak between bins 201 and 202 of equal height.
    CHECK(std::abs(cir.values[1][201]) == Approx(std::abs(cir.values[1][202])));
    CHECK(std::abs(cir.values[1][201]) == Approx(2.0 * raised_cosine(0.5e-9, 100e6, 0.95)));

    const TVCir scatter_only = synthesize_tv_cir(snaps, o, [](const RayPath &p) { return p.tag == PathTag::Scatter; });
    CHECK(std::abs(scatter_only.values[0][200]) < 1e-12);
    CHECK(std::abs(scatter_only.values[0][260]) == Approx(0.5));

    o.max_delay = 100e-9;
    CHECK(synthesize_tv_cir(snaps, o).delays.size() == 101);

    CirOptions coarse = o;
    coarse.resolution = 6e-9;
    CHECK_THROWS_AS(synthesize_tv_cir(snaps, coarse), std::invalid_argument);
    CirOptions bad = o;
    bad.rolloff = 1.5;
    CHECK_THROWS_AS(synthesize_tv_cir(snaps, bad), std::invalid_argument);
    bad = o;
    bad.bandwidth = 0.0;
    CHECK_THROWS_AS(synthesize_tv_cir(snaps, bad), std::invalid_argument);
}

TEST_CASE("specular and scatter power decomposition", "[metrics]")
{
    std::vector<ChannelSnapshot> snaps(2);
    snaps[0].time = 0.0;
    snaps[0].paths = {path(1e-3, 1e-6), path(1e-4, 2e-6, 0, 0, 0, PathTag::Scatter)};
    snaps[1].time = 0.01;
    snaps[1].paths = {path(1e-3, 1e-6)};
    const PowerDecomposition d = power_decomposition(snaps, kVV, 0.0);
    REQUIRE(d.series.size() == 2);
    CHECK(d.series[0].specular_dbm == Approx(-60.0));
    CHECK(d.series[0].scatter_dbm == Approx(-80.0));
    CHECK(d.series[0].total_dbm == Approx(20.0 * std::log10(1.1e-3)));
    CHECK(d.series[1].scatter_dbm == kMinusInfinity);
    CHECK(d.mean_specular_mw == Approx(1e-6));
    CHECK(d.mean_scatter_mw == Approx(0.5e-8));
    CHECK(d.mean_total_mw == Approx((1.21e-6 + 1e-6) / 2.0));
    CHECK(d.specular_fraction == Approx(1e-6 / d.mean_total_mw));

    const PowerDecomposition none = power_decomposition({}, kVV, 0.0);
    CHECK(std::isnan(none.scatter_fraction));
}
