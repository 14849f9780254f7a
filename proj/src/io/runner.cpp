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

#include "runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>

#ifndef ZMS_VERSION
#define ZMS_VERSION "0.0.0"
#endif

namespace zms {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json model_json(const ModelFit& f) {
  return {{"model", to_string(f.model)},
          {"tau_us", f.tau * 1e6},
          {"amplitude", f.amplitude},
          {"offset", f.offset},
          {"r_squared", f.r_squared},
          {"iterations", f.iterations}};
}

void analyze_series(const PeakSeries& peaks, std::optional<FitReport>& envelope,
                    std::optional<SpectrumReport>& spectrum, std::string& error) {
  if (peaks.size() >= 4) {
    try {
      envelope = fit_envelope(peaks);
    } catch (const Error& e) {
      error += std::string("envelope: ") + e.what() + "; ";
    }
  }
  if (peaks.size() >= 8) {
    try {
      spectrum = dominant_frequencies(peaks);
    } catch (const Error& e) {
      error += std::string("spectrum: ") + e.what() + "; ";
    }
  }
}

void write_manifest(const std::string& dir, const RunConfig& config, const std::string& command, double wall,
                    const std::vector<std::string>& files, json extra) {
  json m;
  m["tool"] = "zms";
  m["version"] = version();
  m["command"] = command;
  m["config"] = to_json(config);
  m["seed"] = config.seed;
  m["wall_clock_seconds"] = wall;
  m["derived"] = derived_quantities(config);
  json outputs = json::object();
  for (const auto& f : files) outputs[f] = {{"sha256", sha256_file((fs::path(dir) / f).string())}};
  m["outputs"] = outputs;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write manifest in '" + dir + "'");
  out << m.dump(2) << '\n';
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

}  // namespace

std::string version() { return ZMS_VERSION; }

json to_json(const FitReport& fit) {
  json j = model_json(fit);
  j["used_upper_envelope"] = fit.used_upper_envelope;
  j["points_used"] = fit.points_used;
  j["candidates"] = {model_json(fit.exponential), model_json(fit.gaussian)};
  return j;
}

json to_json(const SpectrumReport& spectrum) {
  json arr = json::array();
  for (const auto& p : spectrum.peaks) arr.push_back({{"frequency_hz", p.frequency}, {"amplitude", p.amplitude}});
  return arr;
}

json to_json(const LinearFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
}

json to_json(const AnalysisOutput& a) {
  json j;
  j["kind"] = a.kind;
  if (a.envelope) j["envelope"] = to_json(*a.envelope);
  if (a.spectrum) j["spectrum"] = to_json(*a.spectrum);
  if (a.fit) j["linear_fit"] = to_json(*a.fit);
  if (!a.error.empty()) j["error"] = a.error;
  return j;
}

json derived_quantities(const RunConfig& config) {
  const MagneticEnvironment env = config.environment();
  const LarmorFrequency larmor = larmor_frequency(config.g_ground, env.mean.norm(), config.units);
  return {{"gamma_hz", config.units.gamma_hz},
          {"mean_field_gauss", {env.mean.x(), env.mean.y(), env.mean.z()}},
          {"sigma_gauss", env.sigma},
          {"larmor_hz", larmor.hz()},
          {"larmor_angular_rad_s", larmor.angular},
          {"larmor_period_us", number_or_null(larmor.period * 1e6)},
          {"zeeman_mean_gamma", std::abs(config.units.zeeman_per_gauss(config.g_ground)) * env.mean.norm()},
          {"zeeman_sigma_gamma", std::abs(config.units.zeeman_per_gauss(config.g_ground)) * env.sigma}};
}

SimulationOutput simulate(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  EnsembleOptions opts;
  opts.summation = config.summation;
  EnsembleResult ens = run_ensemble(config.scheme(), config.sequence(), config.environment(), config.storage_times(),
                                    config.integrator, config.units, opts);
  SimulationOutput out;
  out.normalization = intensity_normalization(ens.traces);
  out.traces = normalized(std::move(ens.traces), out.normalization);
  out.samples = std::move(ens.samples);
  out.peaks = extract_peaks(out.traces);
  analyze_series(out.peaks, out.envelope, out.spectrum, out.analysis_error);
  out.wall_seconds = seconds_since(start);
  return out;
}

SweepOutput sweep(const RunConfig& config) {
  config.validate();
  if (!config.sweep) throw ConfigError("sweep", "is required for a sweep run");
  const auto start = std::chrono::steady_clock::now();
  SweepOutput out;
  std::vector<double> b, f;
  for (double magnitude : config.sweep->b_gauss) {
    RunConfig point = config;
    const double scale = config.field_scale();
    point.field_units = FieldUnits::gauss;
    point.sigma = config.sigma * scale;
    point.mean = magnitude * config.sweep->direction;
    const SimulationOutput sim = simulate(point);
    SweepRow row;
    row.b_gauss = magnitude;
    if (sim.spectrum && !sim.spectrum->peaks.empty()) {
      row.freq_hz = sim.spectrum->peaks[0].frequency;
      if (sim.spectrum->peaks.size() > 1) row.freq2_hz = sim.spectrum->peaks[1].frequency;
      b.push_back(magnitude);
      f.push_back(row.freq_hz);
    }
    if (sim.envelope) {
      row.tau_us = sim.envelope->tau * 1e6;
      row.model = to_string(sim.envelope->model);
    } else {
      row.model = "none";
    }
    out.rows.push_back(row);
    out.spectra.push_back(sim.spectrum.value_or(SpectrumReport{}));
  }
  try {
    out.fit = linear_fit(b, f);
  } catch (const Error& e) {
    out.fit_error = e.what();
  }
  out.wall_seconds = seconds_since(start);
  return out;
}

ClassicalOutput classical(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ClassicalOutput out;
  out.trajectory = total_moment(config.dipoles(), config.classical_times());
  out.decay_time = moment_decay_time(out.trajectory);
  out.wall_seconds = seconds_since(start);
  return out;
}

AnalysisOutput analyze_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string head;
  std::getline(in, head);
  if (!head.empty() && head.back() == '\r') head.pop_back();
  AnalysisOutput out;
  if (head.rfind("storage_time_us,peak_time_us", 0) == 0) {
    out.kind = "peaks";
    out.peaks = read_peaks_csv(path);
  } else if (head.rfind("storage_time_us,t_us", 0) == 0) {
    out.kind = "traces";
    out.peaks = extract_peaks(read_traces_csv(path));
  } else if (head.rfind("b_gauss", 0) == 0) {
    out.kind = "sweep";
    std::vector<double> b, f;
    for (const auto& r : read_sweep_csv(path)) {
      b.push_back(r.b_gauss);
      f.push_back(r.freq_hz);
    }
    out.fit = linear_fit(b, f);
    return out;
  } else {
    throw IoError(path + ": unrecognized header '" + head + "'");
  }
  analyze_series(out.peaks, out.envelope, out.spectrum, out.error);
  return out;
}

void write_simulation(const std::string& dir, const RunConfig& config, const SimulationOutput& out) {
  make_dir(dir);
  write_traces_csv((fs::path(dir) / "traces.csv").string(), out.traces);
  write_peaks_csv((fs::path(dir) / "peaks.csv").string(), out.peaks);
  json extra;
  extra["normalization"] = out.normalization;
  json samples = json::array();
  for (const auto& s : out.samples) samples.push_back({{"b_gauss", {s.b.x(), s.b.y(), s.b.z()}}, {"weight", s.weight}});
  extra["samples"] = samples;
  json analysis = json::object();
  if (out.envelope) analysis["envelope"] = to_json(*out.envelope);
  if (out.spectrum) analysis["spectrum"] = to_json(*out.spectrum);
  if (!out.analysis_error.empty()) analysis["error"] = out.analysis_error;
  extra["analysis"] = analysis;
  write_manifest(dir, config, "simulate", out.wall_seconds, {"traces.csv", "peaks.csv"}, extra);
}

void write_sweep(const std::string& dir, const RunConfig& config, const SweepOutput& out) {
  make_dir(dir);
  write_sweep_csv((fs::path(dir) / "sweep.csv").string(), out.rows);
  json extra;
  json spectra = json::array();
  for (const auto& s : out.spectra) spectra.push_back(to_json(s));
  extra["spectra"] = spectra;
  if (out.fit) extra["linear_fit"] = to_json(*out.fit);
  if (!out.fit_error.empty()) extra["linear_fit_error"] = out.fit_error;
  write_manifest(dir, config, "sweep", out.wall_seconds, {"sweep.csv"}, extra);
}

void write_classical(const std::string& dir, const RunConfig& config, const ClassicalOutput& out) {
  make_dir(dir);
  write_classical_csv((fs::path(dir) / "classical.csv").string(), out.trajectory);
  const DipoleEnsemble d = config.dipoles();
  json extra;
  extra["classical"] = {{"gyro_rad_s_per_gauss", d.gyro},
                        {"mu0", {d.mu0.x(), d.mu0.y(), d.mu0.z()}},
                        {"moment_decay_time_us", number_or_null(out.decay_time * 1e6)}};
  if (config.name == "fig7" || config.name == "fig7-y")
    extra["notes"] = "mean field magnitude set to 4 sigma by default";
  write_manifest(dir, config, "classical", out.wall_seconds, {"classical.csv"}, extra);
}

}  // namespace zms
