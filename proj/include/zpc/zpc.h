// Copyright 2026 The zpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to the zpc pattern compiler and spin-phase simulator.
 *
 * Every function returns a zpc_status. On failure the message of the most
 * recent error on the calling thread is available from zpc_last_error().
 * Objects are opaque handles released with the matching *_free function;
 * passing NULL to a *_free function is a no-op. */

#ifndef ZPC_ZPC_H
#define ZPC_ZPC_H

#include <stddef.h>

#if defined(ZPC_BUILDING_LIBRARY)
#define ZPC_API __attribute__((visibility("default")))
#else
#define ZPC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zpc_status {
    ZPC_OK = 0,
    ZPC_ERR_INVALID_ARGUMENT = 2,
    ZPC_ERR_NUMERICAL = 3,
    ZPC_ERR_PRECOMPENSATION = 4,
    ZPC_ERR_IO = 5,
    ZPC_ERR_INTERNAL = 6
} zpc_status;

typedef enum zpc_mode { ZPC_MODE_SERIAL = 0, ZPC_MODE_PARALLEL = 1 } zpc_mode;

typedef enum zpc_method {
    ZPC_METHOD_EXACT = 0,
    ZPC_METHOD_BESSEL = 1,
    ZPC_METHOD_RWA = 2
} zpc_method;

typedef struct zpc_pattern zpc_pattern;
typedef struct zpc_expansion zpc_expansion;
typedef struct zpc_crystal zpc_crystal;
typedef struct zpc_schedule zpc_schedule;
typedef struct zpc_result zpc_result;

ZPC_API const char *zpc_version(void);
ZPC_API const char *zpc_last_error(void);
/* 0 selects the hardware concurrency. */
ZPC_API zpc_status zpc_set_threads(int count);

/* Special functions. */
ZPC_API zpc_status zpc_bessel_j(int order, double x, double *out);
ZPC_API zpc_status zpc_inverse_j1(double y, double *out);
ZPC_API zpc_status zpc_zernike_radial(int n, int m, double rho, double *out);
ZPC_API zpc_status zpc_zernike_eval(int n, int m, double rho, double phi, double *out);

/* Target patterns. */
ZPC_API zpc_status zpc_pattern_annulus(double amplitude, double r1, double r2, double kappa, zpc_pattern **out);
ZPC_API zpc_status zpc_pattern_elliptical(double amplitude, double eta_x, double eta_y, zpc_pattern **out);
ZPC_API zpc_status zpc_pattern_displaced(double amplitude, double eta, double delta_x, double delta_y,
                                         zpc_pattern **out);
/* amplitude <= 0 takes max |F| of the table. */
ZPC_API zpc_status zpc_pattern_load_csv(const char *path, double amplitude, zpc_pattern **out);
ZPC_API zpc_status zpc_pattern_eval(const zpc_pattern *pattern, double rho, double phi, double *out);
ZPC_API zpc_status zpc_pattern_amplitude(const zpc_pattern *pattern, double *amplitude, double *peak);
ZPC_API void zpc_pattern_free(zpc_pattern *pattern);

/* Ion crystals. */
ZPC_API zpc_status zpc_crystal_hex(int shells, double spacing, double omega, double orientation, zpc_crystal **out);
ZPC_API zpc_status zpc_crystal_load_csv(const char *path, double omega, zpc_crystal **out);
ZPC_API zpc_status zpc_crystal_save_csv(const zpc_crystal *crystal, const char *path);
ZPC_API zpc_status zpc_crystal_size(const zpc_crystal *crystal, size_t *out);
ZPC_API zpc_status zpc_crystal_position(const zpc_crystal *crystal, size_t index, double *rho, double *phi);
ZPC_API void zpc_crystal_free(zpc_crystal *crystal);

/* Zernike expansions. rel_tol <= 0 keeps the default 1e-9. */
ZPC_API zpc_status zpc_decompose(const zpc_pattern *pattern, int n_max, int m_max, double rel_tol,
                                 zpc_expansion **out);
ZPC_API zpc_status zpc_expansion_load_json(const char *path, zpc_expansion **out);
ZPC_API zpc_status zpc_expansion_save_json(const zpc_expansion *expansion, const char *path);
ZPC_API zpc_status zpc_expansion_coefficient(const zpc_expansion *expansion, int n, int m, double *out);
ZPC_API zpc_status zpc_expansion_reconstruct(const zpc_expansion *expansion, double rho, double phi, double *out);
ZPC_API zpc_status zpc_expansion_term_count(const zpc_expansion *expansion, size_t *out);
ZPC_API void zpc_expansion_free(zpc_expansion *expansion);

/* |F - F~| / max|F| on an n_rho x n_phi grid (and at the ions when crystal is not
 * NULL), written as CSV. Either output pointer may be NULL. */
ZPC_API zpc_status zpc_error_map_save(const zpc_pattern *pattern, const zpc_expansion *expansion,
                                      const zpc_crystal *crystal, int n_rho, int n_phi, const char *path,
                                      double *disk_max, double *ion_max);

/* Pulse schedules. rotations: per segment (serial, 0 = automatic) or total
 * (parallel). */
ZPC_API zpc_status zpc_plan(const zpc_expansion *expansion, zpc_mode mode, double strength, double omega, double psi,
                            int rotations, double dm_reset_time, zpc_schedule **out);
ZPC_API zpc_status zpc_schedule_load_json(const char *path, zpc_schedule **out);
ZPC_API zpc_status zpc_schedule_save_json(const zpc_schedule *schedule, const char *path);
ZPC_API zpc_status zpc_schedule_segment_count(const zpc_schedule *schedule, size_t *out);
ZPC_API zpc_status zpc_schedule_times(const zpc_schedule *schedule, double *pulse_time, double *wall_time);
ZPC_API zpc_status zpc_schedule_omega(const zpc_schedule *schedule, double *out);
/* Diagnostics as JSON. The string is owned by the schedule and stays valid
 * until the next call on it or until it is freed. */
ZPC_API zpc_status zpc_schedule_validate(zpc_schedule *schedule, double omega, const char **json_out,
                                         int *warning_count);
ZPC_API void zpc_schedule_free(zpc_schedule *schedule);

/* Evolution. tolerance applies to ZPC_METHOD_EXACT, n_terms to
 * ZPC_METHOD_BESSEL. */
ZPC_API zpc_status zpc_evolve(const zpc_crystal *crystal, const zpc_schedule *schedule, zpc_method method,
                              double tolerance, int n_terms, zpc_result **out);
/* Targets from the schedule calibration: theta* = 2 U0 F T_eff. */
ZPC_API zpc_status zpc_result_set_target(zpc_result *result, const zpc_crystal *crystal, const zpc_pattern *pattern,
                                         const zpc_schedule *schedule);
ZPC_API zpc_status zpc_result_size(const zpc_result *result, size_t *out);
/* Any output pointer may be NULL. Target and infidelity are NaN before a
 * target is set. */
ZPC_API zpc_status zpc_result_ion(const zpc_result *result, size_t index, double *theta, double *sigma_x,
                                  double *sigma_y, double *theta_target, double *infidelity);
ZPC_API zpc_status zpc_result_max_infidelity(const zpc_result *result, double *out);
/* Writes the CSV and, when metadata_path is not NULL, the sidecar JSON. */
ZPC_API zpc_status zpc_result_save(const zpc_result *result, const char *csv_path, const char *metadata_path);
/* log10 histogram of per-ion infidelities (bin_left_log10,count). */
ZPC_API zpc_status zpc_result_save_histogram(const zpc_result *result, const char *path);
ZPC_API void zpc_result_free(zpc_result *result);

ZPC_API double zpc_infidelity(double theta, double theta_target);
ZPC_API double zpc_truncation_bound(double error, double strength, double amplitude, double time);
ZPC_API double zpc_e_requirement(double eps);
ZPC_API double zpc_linear_bound(double amplitude);

/* Studies. Report directories follow the layout described in README.md. */
ZPC_API zpc_status zpc_rwa_study(const double *omegas, size_t omega_count, double strength, double amplitude, int m,
                                 int samples, double t_max, double tolerance, const char *out_dir);
/* name: annulus | elliptical | displaced; tier: 1 or 2. */
ZPC_API zpc_status zpc_run_scenario(const char *name, zpc_mode mode, int tier, double tolerance, const char *out_dir,
                                    double *max_infidelity, int *passed);
ZPC_API zpc_status zpc_reproduce(const char *figure, double tolerance, const char *out_dir, int *passed);

#ifdef __cplusplus
}
#endif

#endif  // ZPC_ZPC_H
