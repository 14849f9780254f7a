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

#ifndef ZMS_ZMS_H_
#define ZMS_ZMS_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
enum {
  ZMS_OK = 0,
  ZMS_ERR_INVALID_ARGUMENT = 1,
  ZMS_ERR_CONFIG = 2,
  ZMS_ERR_NUMERICAL = 3,
  ZMS_ERR_IO = 4,
  ZMS_ERR_INTERNAL = 5
};

typedef struct zms_config zms_config;
typedef struct zms_result zms_result;

/* Message of the last failure on the calling thread; empty after success. */
const char* zms_last_error(void);
const char* zms_version(void);

int zms_config_load_file(const char* path, zms_config** out);
int zms_config_load_string(const char* json, zms_config** out);
int zms_config_preset(const char* name, zms_config** out);
int zms_config_set_seed(zms_config* config, uint64_t seed);
int zms_config_set_samples(zms_config* config, int n_samples);
/* "gauss_hermite" / "gh" or "monte_carlo" / "mc" */
int zms_config_set_sampler(zms_config* config, const char* sampler);
/* "coherent" or "incoherent" */
int zms_config_set_summation(zms_config* config, const char* summation);
int zms_config_set_storage_times_us(zms_config* config, const double* times_us, size_t count);
/* Resolved config as JSON; release with zms_string_free. */
int zms_config_to_json(const zms_config* config, char** json_out);
void zms_config_free(zms_config* config);

int zms_simulate(const zms_config* config, zms_result** out);
/* traces.csv, peaks.csv and manifest.json into dir */
int zms_result_write(const zms_result* result, const zms_config* config, const char* dir);
/* Call with null arrays to query *count; then with arrays of at least *count entries. */
int zms_result_peaks(const zms_result* result, size_t* count, double* storage_time_us, double* peak_intensity);
/* Strongest peak-series frequency in Hz. */
int zms_result_dominant_frequency(const zms_result* result, double* hz);
void zms_result_free(zms_result* result);

/* classical.csv and manifest.json into dir */
int zms_classical(const zms_config* config, const char* dir);
/* sweep.csv and manifest.json into dir; slope in Hz per gauss. */
int zms_sweep(const zms_config* config, const char* dir, double* slope, double* r_squared);
/* Envelope and spectrum of a peaks.csv or traces.csv file, as JSON. */
int zms_analyze_csv(const char* path, char** json_out);
/* Either output pointer may be null. */
int zms_larmor(double g_factor, double b_gauss, double* angular_rad_s, double* period_s);

void zms_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
