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

#ifndef RAILCHAN_CSV_HPP
#define RAILCHAN_CSV_HPP

#include "railchan/metrics.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace railchan
{

// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double v);

class CsvWriter
{
  public:
    explicit CsvWriter(const std::string &path);

    CsvWriter &field(const std::string &s);
    CsvWriter &field(double v);
    CsvWriter &field(std::uint64_t v);
    void end_row();
    void header(const std::vector<std::string> &names);
    void close();

    const std::string &path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
    std::string row_;
    bool first_ = true;
};

inline const std::vector<std::string> &trace_columns()
{
    static const std::vector<std::string> cols{"timestamp_s", "path_id",  "signature", "delay_s", "aod_az_rad", "aod_el_rad",
                                               "aoa_az_rad",  "aoa_el_rad", "doppler_hz", "t_vv_re", "t_vv_im",   "t_vh_re",
                                               "t_vh_im",     "t_hv_re",  "t_hv_im",   "t_hh_re", "t_hh_im",    "tag"};
    return cols;
}

void write_trace_rows(CsvWriter &w, const ChannelSnapshot &snapshot);
void write_metrics_header(CsvWriter &w);
void write_metrics_row(CsvWriter &w, const SnapshotMetrics &m);
void write_tv_cir(const std::string &path, const TVCir &cir);

// Lower-case hex SHA-256 of a file's contents.
std::string sha256_file(const std::string &path);

} // namespace railchan

#endif
