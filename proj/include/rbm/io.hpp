// Copyright 2026 The rbmsim Authors. - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RBMSIM_IO_HPP
#define RBMSIM_IO_HPP

#include <string>
#include <vector>

#include "rbm/dynamics.hpp"
#include "rbm/reports.hpp"

namespace rbm {

/// Shortest round-trip decimal representation ('.' separator, C locale).
std::string format_double(double v);

/// Write-to-temp + atomic rename; no partial files on error.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Columns: time,species,particle,x_1..x_d — prefixed with a replica column
/// when more than one replica is emitted.
std::string trajectory_csv_header(Index dimension, bool with_replica);
void append_trajectory_csv(std::string& out, const Trajectory& traj,
                           int replica, bool with_replica);

std::string trajectory_json(const Trajectory& traj);

/// Columns: tau,mean_error,std_error.
std::string error_series_csv(const ErrorSeries& series);
std::string error_series_json(const ErrorSeries& series);

/// Columns: species,bin_lo,bin_hi,density (one block per species).
std::string histograms_csv(const std::vector<Histogram>& per_species);

std::string cost_report_json(const CostReport& report);
std::string cost_report_csv(const CostReport& report);

std::string consistency_report_json(const ConsistencyReport& report);

}  // namespace rbm

#endif  // RBMSIM_IO_HPP
