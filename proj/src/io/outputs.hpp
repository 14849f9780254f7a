// Copyright 2026 The ZMS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "analysis.hpp"
#include "classical.hpp"

namespace zms {

struct SweepRow {
  double b_gauss = 0.0;
  double freq_hz = 0.0;
  double freq2_hz = 0.0;  ///< second spectral peak, 0 if none
  double tau_us = 0.0;
  std::string model;
};

/// Column layouts shared with the plotting scripts.
inline const std::vector<std::string> kTracesColumns = {"storage_time_us", "t_us", "amp_re", "amp_im", "intensity"};
inline const std::vector<std::string> kPeaksColumns = {"storage_time_us", "peak_time_us", "peak_intensity"};
inline const std::vector<std::string> kClassicalColumns = {"t_us", "Mx", "My", "Mz"};
inline const std::vector<std::string> kSweepColumns = {"b_gauss", "freq_hz", "freq2_hz", "tau_us", "model"};

/// Scale that maps the maximum intensity of the first trace to 1 (1 if that maximum is 0).
double intensity_normalization(const std::vector<RetrievedTrace>& traces);
/// Intensities times `scale`, amplitudes times sqrt(scale).
std::vector<RetrievedTrace> normalized(std::vector<RetrievedTrace> traces, double scale);

void write_traces_csv(const std::string& path, const std::vector<RetrievedTrace>& traces);
void write_peaks_csv(const std::string& path, const PeakSeries& peaks);
void write_classical_csv(const std::string& path, const MomentTrajectory& trajectory);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

/// Readers check the header against the column layout and name any mismatching column.
std::vector<RetrievedTrace> read_traces_csv(const std::string& path);
PeakSeries read_peaks_csv(const std::string& path);
MomentTrajectory read_classical_csv(const std::string& path);
std::vector<SweepRow> read_sweep_csv(const std::string& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

std::string format_number(double v);

}  // namespace zms
