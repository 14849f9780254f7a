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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "config.hpp"
#include "outputs.hpp"

namespace zms {

std::string version();

struct SimulationOutput {
  std::vector<RetrievedTrace> traces;  ///< normalized
  std::vector<FieldSample> samples;
  double normalization = 1.0;
  PeakSeries peaks;
  std::optional<FitReport> envelope;
  std::optional<SpectrumReport> spectrum;
  std::string analysis_error;  ///< why envelope or spectrum is absent
  double wall_seconds = 0.0;
};

struct SweepOutput {
  std::vector<SweepRow> rows;
  std::vector<SpectrumReport> spectra;
  std::optional<LinearFit> fit;
  std::string fit_error;
  double wall_seconds = 0.0;
};

struct ClassicalOutput {
  MomentTrajectory trajectory;
  double decay_time = 0.0;  ///< 1/e time of |M|, seconds; infinity if not reached
  double wall_seconds = 0.0;
};

struct AnalysisOutput {
  std::string kind;  ///< "peaks", "traces" or "sweep"
  PeakSeries peaks;
  std::optional<FitReport> envelope;
  std::optional<SpectrumReport> spectrum;
  std::optional<LinearFit> fit;
  std::string error;
};

SimulationOutput simulate(const RunConfig& config);
SweepOutput sweep(const RunConfig& config);
ClassicalOutput classical(const RunConfig& config);
AnalysisOutput analyze_csv(const std::string& path);

/// Each writer creates the directory, writes its CSV files and a manifest.json
/// holding the resolved config, derived quantities and output hashes.
void write_simulation(const std::string& dir, const RunConfig& config, const SimulationOutput& out);
void write_sweep(const std::string& dir, const RunConfig& config, const SweepOutput& out);
void write_classical(const std::string& dir, const RunConfig& config, const ClassicalOutput& out);

nlohmann::json to_json(const FitReport& fit);
nlohmann::json to_json(const SpectrumReport& spectrum);
nlohmann::json to_json(const LinearFit& fit);
nlohmann::json to_json(const AnalysisOutput& analysis);
/// Larmor frequency and period of the mean field, Gamma, field magnitudes in gauss.
nlohmann::json derived_quantities(const RunConfig& config);

}  // namespace zms
