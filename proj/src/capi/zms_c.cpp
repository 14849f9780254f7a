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

#include "zms/zms.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "runner.hpp"

struct zms_config {
  zms::RunConfig config;
};

struct zms_result {
  zms::SimulationOutput output;
};

namespace {

thread_local std::string last_error;

int fail(int code, const char* what) {
  last_error = what;
  return code;
}

template <typename F>
int guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return ZMS_OK;
  } catch (const zms::ConfigError& e) {
    return fail(ZMS_ERR_CONFIG, e.what());
  } catch (const zms::InvalidArgument& e) {
    return fail(ZMS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const zms::NumericalError& e) {
    return fail(ZMS_ERR_NUMERICAL, e.what());
  } catch (const zms::IoError& e) {
    return fail(ZMS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ZMS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ZMS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ZMS_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* name) {
  if (!p) throw zms::InvalidArgument(std::string(name) + " must not be null");
}

int emit_config(zms::RunConfig c, zms_config** out) {
  *out = new zms_config{std::move(c)};
  return ZMS_OK;
}

}  // namespace

extern "C" {

const char* zms_last_error(void) { return last_error.c_str(); }

const char* zms_version(void) {
  static const std::string v = zms::version();
  return v.c_str();
}

int zms_config_load_file(const char* path, zms_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    emit_config(zms::load_config(path), out);
  });
}

int zms_config_load_string(const char* json, zms_config** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    emit_config(zms::parse_config(json), out);
  });
}

int zms_config_preset(const char* name, zms_config** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    emit_config(zms::preset(name), out);
  });
}

int zms_config_set_seed(zms_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->config.seed = seed;
  });
}

int zms_config_set_samples(zms_config* config, int n_samples) {
  return guarded([&] {
    require(config, "config");
    if (n_samples < 1) throw zms::ConfigError("environment.n_samples", "must be >= 1");
    config->config.n_samples = n_samples;
  });
}

int zms_config_set_sampler(zms_config* config, const char* sampler) {
  return guarded([&] {
    require(config, "config");
    require(sampler, "sampler");
    config->config.sampler = zms::sampler_from_string(sampler);
  });
}

int zms_config_set_summation(zms_config* config, const char* summation) {
  return guarded([&] {
    require(config, "config");
    require(summation, "summation");
    config->config.summation = zms::summation_from_string(summation);
  });
}

int zms_config_set_storage_times_us(zms_config* config, const double* times_us, size_t count) {
  return guarded([&] {
    require(config, "config");
    require(times_us, "times_us");
    zms::RunConfig c = config->config;
    c.storage_times_us.assign(times_us, times_us + count);
    c.validate();
    config->config = std::move(c);
  });
}

int zms_config_to_json(const zms_config* config, char** json_out) {
  return guarded([&] {
    require(config, "config");
    require(json_out, "json_out");
    *json_out = copy_string(zms::to_json(config->config).dump(2));
  });
}

void zms_config_free(zms_config* config) { delete config; }

int zms_simulate(const zms_config* config, zms_result** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = new zms_result{zms::simulate(config->config)};
  });
}

int zms_result_write(const zms_result* result, const zms_config* config, const char* dir) {
  return guarded([&] {
    require(result, "result");
    require(config, "config");
    require(dir, "dir");
    zms::write_simulation(dir, config->config, result->output);
  });
}

int zms_result_peaks(const zms_result* result, size_t* count, double* storage_time_us, double* peak_intensity) {
  return guarded([&] {
    require(result, "result");
    require(count, "count");
    const auto& p = result->output.peaks;
    if (storage_time_us || peak_intensity) {
      if (*count < p.size()) throw zms::InvalidArgument("output arrays are too short");
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (storage_time_us) storage_time_us[i] = p.storage_times[i] * 1e6;
        if (peak_intensity) peak_intensity[i] = p.peak_intensity[i];
      }
    }
    *count = p.size();
  });
}

int zms_result_dominant_frequency(const zms_result* result, double* hz) {
  return guarded([&] {
    require(result, "result");
    require(hz, "hz");
    const auto& s = result->output.spectrum;
    if (!s || s->peaks.empty())
      throw zms::NumericalError("no spectrum available: " + result->output.analysis_error);
    *hz = s->peaks.front().frequency;
  });
}

void zms_result_free(zms_result* result) { delete result; }

int zms_classical(const zms_config* config, const char* dir) {
  return guarded([&] {
    require(config, "config");
    require(dir, "dir");
    zms::write_classical(dir, config->config, zms::classical(config->config));
  });
}

int zms_sweep(const zms_config* config, const char* dir, double* slope, double* r_squared) {
  return guarded([&] {
    require(config, "config");
    require(dir, "dir");
    const zms::SweepOutput out = zms::sweep(config->config);
    zms::write_sweep(dir, config->config, out);
    if (!out.fit) throw zms::NumericalError("linear fit failed: " + out.fit_error);
    if (slope) *slope = out.fit->slope;
    if (r_squared) *r_squared = out.fit->r_squared;
  });
}

int zms_analyze_csv(const char* path, char** json_out) {
  return guarded([&] {
    require(path, "path");
    require(json_out, "json_out");
    *json_out = copy_string(zms::to_json(zms::analyze_csv(path)).dump(2));
  });
}

int zms_larmor(double g_factor, double b_gauss, double* angular_rad_s, double* period_s) {
  return guarded([&] {
    const zms::LarmorFrequency l = zms::larmor_frequency(g_factor, b_gauss, zms::UnitSystem{});
    if (angular_rad_s) *angular_rad_s = l.angular;
    if (period_s) *period_s = l.period;
  });
}

void zms_string_free(char* s) { std::free(s); }

}  // extern "C"
