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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "analysis.hpp"
#include "classical.hpp"
#include "ensemble.hpp"

namespace zms {

/// Named polarization ("x", "y", "z", "sigma+", "sigma-") or an explicit Cartesian vector.
struct PolarizationSpec {
  std::string name;
  Eigen::Vector3cd cartesian = Eigen::Vector3cd::UnitX();

  static PolarizationSpec named(const std::string& name);
  [[nodiscard]] SphericalPolarization spherical() const;
  bool operator==(const PolarizationSpec&) const = default;
};

struct FieldSpec {
  double rabi = 0.0;  ///< units of Gamma
  PolarizationSpec polarization;
  double phase = 0.0;
  double detuning = 0.0;  ///< units of Gamma
  bool operator==(const FieldSpec&) const = default;
};

/// "gauss", or "gamma" for g_ground mu_B B / hbar expressed in units of Gamma.
enum class FieldUnits { gauss, gamma };

struct SweepSpec {
  std::vector<double> b_gauss;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitY();
  bool operator==(const SweepSpec&) const = default;
};

struct ClassicalSpec {
  Eigen::Vector3d mu0 = Eigen::Vector3d::UnitY();
  std::optional<double> gyro;  ///< rad/s per gauss; default 2 pi |g_ground| mu_B / h
  double t_max_us = 30.0;
  double t_step_us = 0.05;
  bool operator==(const ClassicalSpec&) const = default;
};

struct RunConfig {
  std::string name;

  double fg = 1.0;
  double fe = 0.0;
  double g_ground = -0.25;
  double g_excited = 0.0;
  std::optional<double> decay_hz;  ///< excited decay Gamma/2pi; defaults to units.gamma_hz
  UnitSystem units;

  double write_us = 10.6;
  double read_us = 5.0;
  std::vector<double> storage_times_us;
  std::vector<FieldSpec> write_fields;
  std::vector<FieldSpec> read_fields;
  PolarizationSpec detect = PolarizationSpec::named("x");

  FieldUnits field_units = FieldUnits::gauss;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d inhom_axis = Eigen::Vector3d::UnitX();
  double sigma = 0.0;
  Sampler sampler = Sampler::gauss_hermite;
  int n_samples = 21;
  std::uint64_t seed = 0;

  IntegratorConfig integrator;
  Summation summation = Summation::coherent;
  std::string output_dir = "out";

  std::optional<SweepSpec> sweep;
  std::optional<ClassicalSpec> classical;

  bool operator==(const RunConfig& o) const;

  /// Gauss per configured field unit.
  [[nodiscard]] double field_scale() const;
  [[nodiscard]] LevelScheme scheme() const;
  [[nodiscard]] PulseSequence sequence() const;
  [[nodiscard]] MagneticEnvironment environment() const;
  [[nodiscard]] DipoleEnsemble dipoles() const;
  [[nodiscard]] std::vector<double> storage_times() const;  ///< seconds
  [[nodiscard]] std::vector<double> classical_times() const;  ///< seconds

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

std::string to_string(Sampler s);
std::string to_string(Summation s);
std::string to_string(FieldUnits u);
Sampler sampler_from_string(const std::string& s);
Summation summation_from_string(const std::string& s);

nlohmann::json to_json(const RunConfig& config);
/// Physics-critical keys (Rabi frequencies, environment.mean, environment.sigma) are required.
/// A run manifest is accepted too; its "config" member is used.
RunConfig config_from_json(const nlohmann::json& j);
/// Parse errors report line and column.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
RunConfig preset(const std::string& name);

}  // namespace zms
