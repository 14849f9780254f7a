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

#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace zms {

using nlohmann::json;

namespace {

const double kInvSqrt2 = std::sqrt(0.5);

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
  const json* v = find(obj, key);
  return v ? number_at(*v, join(path, key)) : fallback;
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
  const json* v = find(obj, key);
  if (!v) throw ConfigError(join(path, key), "is required");
  return number_at(*v, join(path, key));
}

std::string get_string(const json& obj, const std::string& key, const std::string& path, const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError(join(path, key), "expected a string");
  return v->get<std::string>();
}

Eigen::Vector3d vector3_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = number_at(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

json vector3_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

std::vector<double> number_list_at(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }
  if (j.is_object()) {
    const double start = require_number(j, "start", path);
    const double stop = require_number(j, "stop", path);
    const double step = require_number(j, "step", path);
    if (!(step > 0.0)) throw ConfigError(join(path, "step"), "must be positive");
    if (stop < start) throw ConfigError(join(path, "stop"), "must not be below start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 1000000) throw ConfigError(path, "range has too many points");
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  throw ConfigError(path, "expected an array or a {start, stop, step} range");
}

PolarizationSpec polarization_at(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return PolarizationSpec::named(j.get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ConfigError(path, e.what());
    }
  }
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected a name or 3 components [re, im] or re");
  PolarizationSpec p;
  p.name.clear();
  for (int i = 0; i < 3; ++i) {
    const std::string ip = path + "[" + std::to_string(i) + "]";
    if (j[i].is_array()) {
      if (j[i].size() != 2) throw ConfigError(ip, "complex component must be [re, im]");
      p.cartesian(i) = Complex(number_at(j[i][0], ip + "[0]"), number_at(j[i][1], ip + "[1]"));
    } else {
      p.cartesian(i) = Complex(number_at(j[i], ip), 0.0);
    }
  }
  const double n = p.cartesian.norm();
  if (!(n > 0.0)) throw ConfigError(path, "polarization vector must be nonzero");
  if (std::abs(n - 1.0) > 1e-9) throw ConfigError(path, "polarization vector must be normalized");
  return p;
}

json polarization_json(const PolarizationSpec& p) {
  if (!p.name.empty()) return p.name;
  json arr = json::array();
  for (int i = 0; i < 3; ++i) arr.push_back(json::array({p.cartesian(i).real(), p.cartesian(i).imag()}));
  return arr;
}

std::vector<FieldSpec> fields_at(const json& obj, const std::string& key, const std::string& path) {
  const std::string fp = join(path, key);
  const json* arr = find(obj, key);
  if (!arr) throw ConfigError(fp, "is required");
  if (!arr->is_array() || arr->empty()) throw ConfigError(fp, "expected a nonempty array of fields");
  std::vector<FieldSpec> out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const json& f = (*arr)[i];
    const std::string ip = fp + "[" + std::to_string(i) + "]";
    require_object(f, ip);
    FieldSpec spec;
    spec.rabi = require_number(f, "rabi", ip);
    const json* pol = find(f, "polarization");
    if (!pol) throw ConfigError(join(ip, "polarization"), "is required");
    spec.polarization = polarization_at(*pol, join(ip, "polarization"));
    spec.phase = get_number(f, "phase", ip, 0.0);
    spec.detuning = get_number(f, "detuning", ip, 0.0);
    out.push_back(spec);
  }
  return out;
}

json fields_json(const std::vector<FieldSpec>& fields) {
  json arr = json::array();
  for (const auto& f : fields)
    arr.push_back({{"rabi", f.rabi},
                   {"polarization", polarization_json(f.polarization)},
                   {"phase", f.phase},
                   {"detuning", f.detuning}});
  return arr;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(join(path, it.key()), "unknown key");
  }
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

PolarizationSpec PolarizationSpec::named(const std::string& name) {
  PolarizationSpec p;
  p.name = name;
  const Complex i(0.0, 1.0);
  if (name == "x") {
    p.cartesian = Eigen::Vector3cd(1.0, 0.0, 0.0);
  } else if (name == "y") {
    p.cartesian = Eigen::Vector3cd(0.0, 1.0, 0.0);
  } else if (name == "z") {
    p.cartesian = Eigen::Vector3cd(0.0, 0.0, 1.0);
  } else if (name == "sigma+") {
    p.cartesian = Eigen::Vector3cd(-kInvSqrt2, -kInvSqrt2 * i, 0.0);
  } else if (name == "sigma-") {
    p.cartesian = Eigen::Vector3cd(kInvSqrt2, -kInvSqrt2 * i, 0.0);
  } else {
    throw InvalidArgument("unknown polarization '" + name + "' (x, y, z, sigma+, sigma-)");
  }
  return p;
}

SphericalPolarization PolarizationSpec::spherical() const { return spherical_components(cartesian).normalized(); }

std::string to_string(Sampler s) { return s == Sampler::gauss_hermite ? "gauss_hermite" : "monte_carlo"; }
std::string to_string(Summation s) { return s == Summation::coherent ? "coherent" : "incoherent"; }
std::string to_string(FieldUnits u) { return u == FieldUnits::gauss ? "gauss" : "gamma"; }

Sampler sampler_from_string(const std::string& s) {
  if (s == "gauss_hermite" || s == "gh") return Sampler::gauss_hermite;
  if (s == "monte_carlo" || s == "mc") return Sampler::monte_carlo;
  throw ConfigError("environment.sampler", "unknown sampler '" + s + "'");
}

Summation summation_from_string(const std::string& s) {
  if (s == "coherent") return Summation::coherent;
  if (s == "incoherent") return Summation::incoherent;
  throw ConfigError("summation", "unknown summation '" + s + "'");
}

bool RunConfig::operator==(const RunConfig& o) const {
  return name == o.name && fg == o.fg && fe == o.fe && g_ground == o.g_ground && g_excited == o.g_excited &&
         decay_hz == o.decay_hz && units.gamma_hz == o.units.gamma_hz && units.mu_b_over_h == o.units.mu_b_over_h &&
         write_us == o.write_us && read_us == o.read_us && storage_times_us == o.storage_times_us &&
         write_fields == o.write_fields && read_fields == o.read_fields && detect == o.detect &&
         field_units == o.field_units && mean == o.mean && inhom_axis == o.inhom_axis && sigma == o.sigma &&
         sampler == o.sampler && n_samples == o.n_samples && seed == o.seed && integrator.dt == o.integrator.dt &&
         integrator.sample_interval == o.integrator.sample_interval &&
         integrator.exact_dark == o.integrator.exact_dark && summation == o.summation &&
         output_dir == o.output_dir && sweep == o.sweep && classical == o.classical;
}

double RunConfig::field_scale() const {
  if (field_units == FieldUnits::gauss) return 1.0;
  const double per_gauss = std::abs(units.zeeman_per_gauss(g_ground));
  if (!(per_gauss > 0.0)) throw ConfigError("field_units", "'gamma' needs a nonzero g_ground");
  return 1.0 / per_gauss;
}

LevelScheme RunConfig::scheme() const {
  LevelScheme s;
  try {
    s.fg = AngularMomentum::from_double(fg);
    s.fe = AngularMomentum::from_double(fe);
  } catch (const InvalidArgument& e) {
    throw ConfigError("scheme", e.what());
  }
  s.gamma = 2.0 * std::numbers::pi * decay_hz.value_or(units.gamma_hz);
  s.g_ground = g_ground;
  s.g_excited = g_excited;
  return s;
}

PulseSequence RunConfig::sequence() const {
  auto convert = [](const std::vector<FieldSpec>& in) {
    std::vector<OpticalField> out;
    for (const auto& f : in) out.push_back({f.rabi, f.polarization.spherical(), f.phase, f.detuning});
    return out;
  };
  PulseSequence seq;
  seq.write.duration = write_us * 1e-6;
  seq.write.optical_fields = convert(write_fields);
  seq.read.duration = read_us * 1e-6;
  seq.read.optical_fields = convert(read_fields);
  seq.detect_polarization = detect.spherical();
  return seq;
}

MagneticEnvironment RunConfig::environment() const {
  MagneticEnvironment env;
  const double scale = field_scale();
  env.mean = mean * scale;
  env.inhom_axis = inhom_axis;
  env.sigma = sigma * scale;
  env.sampler = sampler;
  env.n_samples = n_samples;
  env.seed = seed;
  return env;
}

DipoleEnsemble RunConfig::dipoles() const {
  DipoleEnsemble d;
  d.env = environment();
  if (classical) {
    d.mu0 = classical->mu0;
    d.gyro = classical->gyro.value_or(2.0 * std::numbers::pi * std::abs(g_ground) * units.mu_b_over_h);
  } else {
    d.gyro = 2.0 * std::numbers::pi * std::abs(g_ground) * units.mu_b_over_h;
  }
  return d;
}

std::vector<double> RunConfig::storage_times() const {
  std::vector<double> out;
  for (double t : storage_times_us) out.push_back(t * 1e-6);
  return out;
}

std::vector<double> RunConfig::classical_times() const {
  const ClassicalSpec spec = classical.value_or(ClassicalSpec{});
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor(spec.t_max_us / spec.t_step_us + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) out.push_back(static_cast<double>(i) * spec.t_step_us * 1e-6);
  return out;
}

void RunConfig::validate() const {
  scheme().validate();
  try {
    units.validate();
  } catch (const Error& e) {
    throw ConfigError("units", e.what());
  }
  if (!(write_us > 0.0)) throw ConfigError("sequence.write_us", "must be positive");
  if (!(read_us > 0.0)) throw ConfigError("sequence.read_us", "must be positive");
  if (storage_times_us.empty()) throw ConfigError("sequence.storage_times_us", "must be nonempty");
  for (double t : storage_times_us)
    if (!(t >= 0.0)) throw ConfigError("sequence.storage_times_us", "storage times must be >= 0");
  if (write_fields.empty()) throw ConfigError("sequence.write_fields", "must be nonempty");
  if (read_fields.empty()) throw ConfigError("sequence.read_fields", "must be nonempty");
  if (!(n_samples >= 1)) throw ConfigError("environment.n_samples", "must be >= 1");
  if (!(sigma >= 0.0)) throw ConfigError("environment.sigma", "must be >= 0");
  if (std::abs(inhom_axis.norm() - 1.0) > 1e-12) throw ConfigError("environment.inhom_axis", "must be a unit vector");
  try {
    integrator.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("integrator", e.what());
  }
  try {
    sequence().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("sequence", e.what());
  }
  if (sweep) {
    if (sweep->b_gauss.empty()) throw ConfigError("sweep.b_gauss", "must be nonempty");
    if (std::abs(sweep->direction.norm() - 1.0) > 1e-12) throw ConfigError("sweep.direction", "must be a unit vector");
  }
  if (classical) {
    if (std::abs(classical->mu0.norm() - 1.0) > 1e-12) throw ConfigError("classical.mu0", "must be a unit vector");
    if (classical->gyro && (*classical->gyro == 0.0 || !std::isfinite(*classical->gyro)))
      throw ConfigError("classical.gyro", "must be finite and nonzero");
    if (!(classical->t_step_us > 0.0)) throw ConfigError("classical.t_step_us", "must be positive");
    if (!(classical->t_max_us >= 0.0)) throw ConfigError("classical.t_max_us", "must be >= 0");
  }
}

json to_json(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["scheme"] = {{"fg", c.fg}, {"fe", c.fe}, {"g_ground", c.g_ground}, {"g_excited", c.g_excited}};
  if (c.decay_hz) j["scheme"]["decay_hz"] = *c.decay_hz;
  j["units"] = {{"gamma_hz", c.units.gamma_hz}, {"mu_b_over_h", c.units.mu_b_over_h}};
  j["sequence"] = {{"write_us", c.write_us},
                   {"read_us", c.read_us},
                   {"storage_times_us", c.storage_times_us},
                   {"write_fields", fields_json(c.write_fields)},
                   {"read_fields", fields_json(c.read_fields)},
                   {"detect", polarization_json(c.detect)}};
  j["environment"] = {{"field_units", to_string(c.field_units)},
                      {"mean", vector3_json(c.mean)},
                      {"inhom_axis", vector3_json(c.inhom_axis)},
                      {"sigma", c.sigma},
                      {"sampler", to_string(c.sampler)},
                      {"n_samples", c.n_samples},
                      {"seed", c.seed}};
  j["integrator"] = {{"dt", c.integrator.dt},
                     {"sample_interval", c.integrator.sample_interval},
                     {"exact_dark", c.integrator.exact_dark}};
  j["summation"] = to_string(c.summation);
  j["output_dir"] = c.output_dir;
  if (c.sweep) j["sweep"] = {{"b_gauss", c.sweep->b_gauss}, {"direction", vector3_json(c.sweep->direction)}};
  if (c.classical) {
    j["classical"] = {{"mu0", vector3_json(c.classical->mu0)},
                      {"t_max_us", c.classical->t_max_us},
                      {"t_step_us", c.classical->t_step_us}};
    if (c.classical->gyro) j["classical"]["gyro"] = *c.classical->gyro;
  }
  return j;
}

RunConfig config_from_json(const json& input) {
  require_object(input, "");
  // a run manifest carries the resolved config
  if (input.contains("config") && input.contains("outputs")) return config_from_json(input.at("config"));
  const json& j = input;
  check_keys(j, "", {"name", "scheme", "units", "sequence", "environment", "integrator", "summation", "output_dir",
                     "sweep", "classical"});
  RunConfig c;
  c.name = get_string(j, "name", "", "");

  if (const json* s = find(j, "scheme")) {
    require_object(*s, "scheme");
    check_keys(*s, "scheme", {"fg", "fe", "g_ground", "g_excited", "decay_hz"});
    c.fg = get_number(*s, "fg", "scheme", c.fg);
    c.fe = get_number(*s, "fe", "scheme", c.fe);
    c.g_ground = get_number(*s, "g_ground", "scheme", c.g_ground);
    c.g_excited = get_number(*s, "g_excited", "scheme", c.g_excited);
    if (find(*s, "decay_hz")) c.decay_hz = require_number(*s, "decay_hz", "scheme");
  }
  if (const json* u = find(j, "units")) {
    require_object(*u, "units");
    check_keys(*u, "units", {"gamma_hz", "mu_b_over_h"});
    c.units.gamma_hz = get_number(*u, "gamma_hz", "units", c.units.gamma_hz);
    c.units.mu_b_over_h = get_number(*u, "mu_b_over_h", "units", c.units.mu_b_over_h);
  }

  const json* seq = find(j, "sequence");
  if (!seq) throw ConfigError("sequence", "is required");
  require_object(*seq, "sequence");
  check_keys(*seq, "sequence", {"write_us", "read_us", "storage_times_us", "write_fields", "read_fields", "detect"});
  c.write_us = get_number(*seq, "write_us", "sequence", c.write_us);
  c.read_us = get_number(*seq, "read_us", "sequence", c.read_us);
  const json* st = find(*seq, "storage_times_us");
  if (!st) throw ConfigError("sequence.storage_times_us", "is required");
  c.storage_times_us = number_list_at(*st, "sequence.storage_times_us");
  c.write_fields = fields_at(*seq, "write_fields", "sequence");
  c.read_fields = fields_at(*seq, "read_fields", "sequence");
  if (const json* d = find(*seq, "detect")) c.detect = polarization_at(*d, "sequence.detect");

  const json* env = find(j, "environment");
  if (!env) throw ConfigError("environment", "is required");
  require_object(*env, "environment");
  check_keys(*env, "environment", {"field_units", "mean", "inhom_axis", "sigma", "sampler", "n_samples", "seed"});
  const std::string units = get_string(*env, "field_units", "environment", "gauss");
  if (units == "gauss") {
    c.field_units = FieldUnits::gauss;
  } else if (units == "gamma") {
    c.field_units = FieldUnits::gamma;
  } else {
    throw ConfigError("environment.field_units", "expected 'gauss' or 'gamma'");
  }
  const json* mean = find(*env, "mean");
  if (!mean) throw ConfigError("environment.mean", "is required");
  c.mean = vector3_at(*mean, "environment.mean");
  if (const json* axis = find(*env, "inhom_axis")) c.inhom_axis = vector3_at(*axis, "environment.inhom_axis");
  c.sigma = require_number(*env, "sigma", "environment");
  c.sampler = sampler_from_string(get_string(*env, "sampler", "environment", "gauss_hermite"));
  if (const json* n = find(*env, "n_samples")) {
    if (!n->is_number_integer()) throw ConfigError("environment.n_samples", "expected an integer");
    c.n_samples = n->get<int>();
  }
  if (const json* seed = find(*env, "seed")) {
    if (!seed->is_number_integer()) throw ConfigError("environment.seed", "expected an integer");
    c.seed = seed->is_number_unsigned() ? seed->get<std::uint64_t>()
                                        : static_cast<std::uint64_t>(seed->get<std::int64_t>());
  }

  if (const json* integ = find(j, "integrator")) {
    require_object(*integ, "integrator");
    check_keys(*integ, "integrator", {"dt", "sample_interval", "exact_dark"});
    c.integrator.dt = get_number(*integ, "dt", "integrator", c.integrator.dt);
    c.integrator.sample_interval = get_number(*integ, "sample_interval", "integrator", c.integrator.sample_interval);
    if (const json* e = find(*integ, "exact_dark")) {
      if (!e->is_boolean()) throw ConfigError("integrator.exact_dark", "expected a boolean");
      c.integrator.exact_dark = e->get<bool>();
    }
  }
  c.summation = summation_from_string(get_string(j, "summation", "", "coherent"));
  c.output_dir = get_string(j, "output_dir", "", c.output_dir);

  if (const json* sw = find(j, "sweep")) {
    require_object(*sw, "sweep");
    check_keys(*sw, "sweep", {"b_gauss", "direction"});
    SweepSpec spec;
    const json* b = find(*sw, "b_gauss");
    if (!b) throw ConfigError("sweep.b_gauss", "is required");
    spec.b_gauss = number_list_at(*b, "sweep.b_gauss");
    if (const json* d = find(*sw, "direction")) spec.direction = vector3_at(*d, "sweep.direction");
    c.sweep = spec;
  }
  if (const json* cl = find(j, "classical")) {
    require_object(*cl, "classical");
    check_keys(*cl, "classical", {"mu0", "gyro", "t_max_us", "t_step_us"});
    ClassicalSpec spec;
    if (const json* m = find(*cl, "mu0")) spec.mu0 = vector3_at(*m, "classical.mu0");
    if (find(*cl, "gyro")) spec.gyro = require_number(*cl, "gyro", "classical");
    spec.t_max_us = get_number(*cl, "t_max_us", "classical", spec.t_max_us);
    spec.t_step_us = get_number(*cl, "t_step_us", "classical", spec.t_step_us);
    c.classical = spec;
  }
  c.validate();
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << "line " << line << ", column " << col << ": " << e.what();
    throw ConfigError("", msg.str());
  }
  return config_from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), e.detail() + " (in " + path + ")");
  }
}

}  // namespace zms
