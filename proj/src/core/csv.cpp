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

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace railchan
{

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), r.ptr);
}

CsvWriter::CsvWriter(const std::string &path) : path_(path), out_(path, std::ios::binary)
{
    if (!out_)
        throw std::runtime_error("cannot open '" + path + "' for writing");
}

CsvWriter &CsvWriter::field(const std::string &s)
{
    if (!first_)
        row_ += ',';
    first_ = false;
    if (s.find_first_of(",\"\n") != std::string::npos)
    {
        row_ += '"';
        for (char ch : s)
        {
            if (ch == '"')
                row_ += '"';
            row_ += ch;
        }
        row_ += '"';
    }
    else
        row_ += s;
    return *this;
}

CsvWriter &CsvWriter::field(double v) { return field(format_double(v)); }

CsvWriter &CsvWriter::field(std::uint64_t v) { return field(std::to_string(v)); }

void CsvWriter::end_row()
{
    row_ += '\n';
    out_ << row_;
    row_.clear();
    first_ = true;
}

void CsvWriter::header(const std::vector<std::string> &names)
{
    for (const auto &n : names)
        field(n);
    end_row();
}

void CsvWriter::close()
{
    out_.close();
    if (!out_)
        throw std::runtime_error("error while writing '" + path_ + "'");
}

void write_trace_rows(CsvWriter &w, const ChannelSnapshot &s)
{
    for (std::size_t i = 0; i < s.paths.size(); ++i)
    {
        const RayPath &p = s.paths[i];
        w.field(s.time).field(s.path_ids[i]).field(to_string(p.signature()));
        w.field(p.delay).field(p.aod.azimuth).field(p.aod.elevation).field(p.aoa.azimuth).field(p.aoa.elevation).field(p.doppler_hz);
        for (PolPair pp : {kVV, kVH, kHV, kHH})
            w.field(p.transfer(pp).real()).field(p.transfer(pp).imag());
        w.field(std::string(p.tag == PathTag::Scatter ? "scatter" : "specular"));
        w.end_row();
    }
}

void write_metrics_header(CsvWriter &w)
{
    w.field(std::string("timestamp_s")).field(std::string("path_count"));
    for (const auto &m : metric_table())
        w.field(std::string(m.name));
    w.end_row();
}

void write_metrics_row(CsvWriter &w, const SnapshotMetrics &m)
{
    w.field(m.time).field(static_cast<std::uint64_t>(m.path_count));
    for (const auto &info : metric_table())
        w.field(m.*info.field);
    w.end_row();
}

void write_tv_cir(const std::string &path, const TVCir &cir)
{
    CsvWriter w(path);
    w.field(std::string("delay_s"));
    for (double t : cir.times)
        w.field(format_double(t) + "_re").field(format_double(t) + "_im");
    w.end_row();
    for (std::size_t d = 0; d < cir.delays.size(); ++d)
    {
        w.field(cir.delays[d]);
        for (std::size_t t = 0; t < cir.times.size(); ++t)
            w.field(cir.values[t][d].real()).field(cir.values[t][d].imag());
        w.end_row();
    }
    w.close();
}

std::string sha256_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read '" + path + "'");
    EVP_MD_CTX *ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
    {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256: digest initialisation failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in)
    {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

} // namespace railchan
