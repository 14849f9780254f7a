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

#include "dynamics.hpp"

namespace zms {

struct PeakSeries {
  std::vector<double> storage_times;   ///< seconds
  std::vector<double> peak_time;       ///< seconds since read turn-on
  std::vector<double> peak_intensity;

  [[nodiscard]] std::size_t size() const { return storage_times.size(); }
};

enum class EnvelopeModel { exponential, gaussian };

std::string to_string(EnvelopeModel m);
EnvelopeModel envelope_model_from_string(const std::string& s);

struct ModelFit {
  EnvelopeModel model = EnvelopeModel::exponential;
  double tau = 0.0;  ///< seconds
  double amplitude = 0.0;
  double offset = 0.0;
  double r_squared = 0.0;
  int iterations = 0;

  [[nodiscard]] double evaluate(double t) const;
};

struct FitReport : ModelFit {
  ModelFit exponential;  ///< both candidate fits, for reporting
  ModelFit gaussian;
  bool used_upper_envelope = false;
  std::size_t points_used = 0;
};

struct SpectralPeak {
  double frequency = 0.0;  ///< Hz
  double amplitude = 0.0;  ///< a unit cosine gives about 1
};

struct SpectrumReport {
  std::vector<SpectralPeak> peaks;  ///< at most 3, strongest first
};

/// Maximum of every trace; ties resolve to the earliest sample.
PeakSeries extract_peaks(const std::vector<RetrievedTrace>& traces);

/// Interior local maxima of y, or empty when there are fewer than two.
std::vector<std::size_t> upper_envelope_indices(const std::vector<double>& y);

/// Levenberg-Marquardt fit of a * f(t / tau) + c for one model.
ModelFit fit_model(EnvelopeModel model, const std::vector<double>& t, const std::vector<double>& y);

FitReport fit_envelope(const PeakSeries& series);

SpectrumReport dominant_frequencies(const PeakSeries& series);

/// Same estimator on an arbitrary uniformly sampled series with a given trend removed.
SpectrumReport spectral_peaks(const std::vector<double>& t, const std::vector<double>& residual, int pad_factor = 16);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace zms
