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

#include <cmath>
#include <map>

#include "config.hpp"

namespace zms {

namespace {

constexpr double kMeanZeeman = 0.02;     // g mu_B B / hbar in units of Gamma
constexpr double kSpreadZeeman = 0.005;
const double kInvSqrt2 = std::sqrt(0.5);

std::vector<double> grid(double start, double stop, double step) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

// Orthogonal linear write pair, read parallel to W', detection along W.
RunConfig linear_base(const std::string& name) {
  RunConfig c;
  c.name = name;
  c.write_fields = {{0.5, PolarizationSpec::named("x")}, {0.25, PolarizationSpec::named("y")}};
  c.read_fields = {{0.125, PolarizationSpec::named("y")}};
  c.detect = PolarizationSpec::named("x");
  c.field_units = FieldUnits::gamma;
  c.sigma = kSpreadZeeman;
  c.inhom_axis = Eigen::Vector3d::UnitX();
  c.storage_times_us = grid(0.0, 40.0, 0.5);
  c.output_dir = "out/" + name;
  return c;
}

// Opposite circular write pair, read sharing the W' polarization, detection orthogonal to it.
RunConfig circular_base(const std::string& name) {
  RunConfig c = linear_base(name);
  c.write_fields = {{0.5, PolarizationSpec::named("sigma+")}, {0.25, PolarizationSpec::named("sigma-")}};
  c.read_fields = {{0.125, PolarizationSpec::named("sigma-")}};
  c.detect = PolarizationSpec::named("sigma+");
  return c;
}

// W polarized halfway between the field axis (y) and z, W' and R along x, detection along W.
RunConfig tilted_base(const std::string& name) {
  RunConfig c = linear_base(name);
  PolarizationSpec tilted;
  tilted.name.clear();
  tilted.cartesian = Eigen::Vector3cd(0.0, kInvSqrt2, kInvSqrt2);
  c.write_fields = {{0.5, tilted}, {0.25, PolarizationSpec::named("x")}};
  c.read_fields = {{0.125, PolarizationSpec::named("x")}};
  c.detect = tilted;
  return c;
}

struct PresetEntry {
  std::string description;
  RunConfig (*make)();
};

const std::map<std::string, PresetEntry>& registry() {
  static const std::map<std::string, PresetEntry> presets = {
      {"fig4",
       {"zero mean field, Gaussian spread 5e-3 Gamma along x, linear polarizations",
        [] { return linear_base("fig4"); }}},
      {"fig5",
       {"mean field 2e-2 Gamma along x, spread 5e-3 Gamma along x",
        [] {
          RunConfig c = linear_base("fig5");
          c.mean = Eigen::Vector3d(kMeanZeeman, 0.0, 0.0);
          return c;
        }}},
      {"fig6",
       {"mean field 2e-2 Gamma along y, spread 5e-3 Gamma along x",
        [] {
          RunConfig c = linear_base("fig6");
          c.mean = Eigen::Vector3d(0.0, kMeanZeeman, 0.0);
          return c;
        }}},
      {"fig7",
       {"classical dipoles from y, mean field 4 sigma along z, spread along x",
        [] {
          RunConfig c = linear_base("fig7");
          c.mean = Eigen::Vector3d(0.0, 0.0, 4.0 * kSpreadZeeman);
          c.n_samples = 31;
          c.classical = ClassicalSpec{};
          return c;
        }}},
      {"fig7-y",
       {"classical dipoles from y, mean field 4 sigma along y, spread along x",
        [] {
          RunConfig c = linear_base("fig7-y");
          c.mean = Eigen::Vector3d(0.0, 4.0 * kSpreadZeeman, 0.0);
          c.n_samples = 31;
          c.classical = ClassicalSpec{};
          return c;
        }}},
      {"fig3",
       {"frequency sweep, homogeneous field along y from 0.2 to 1.0 G, W tilted toward the field",
        [] {
          RunConfig c = tilted_base("fig3");
          c.read_us = 1.0;
          c.field_units = FieldUnits::gauss;
          c.sigma = 0.0;
          c.n_samples = 1;
          c.storage_times_us = grid(0.0, 40.0, 0.25);
          c.sweep = SweepSpec{{0.2, 0.4, 0.6, 0.8, 1.0}, Eigen::Vector3d::UnitY()};
          return c;
        }}},
      {"circular",
       {"circular polarizations, mean field 2e-2 Gamma along y, spread 5e-3 Gamma along x",
        [] {
          RunConfig c = circular_base("circular");
          c.mean = Eigen::Vector3d(0.0, kMeanZeeman, 0.0);
          return c;
        }}},
  };
  return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, entry] : registry()) out.push_back(name);
  return out;
}

std::string preset_description(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("preset", "unknown preset '" + name + "'");
  return it->second.description;
}

RunConfig preset(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("preset", "unknown preset '" + name + "'");
  RunConfig c = it->second.make();
  c.validate();
  return c;
}

}  // namespace zms
