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


#include "zpc/zpc.h"

#include <cmath>
#include <exception>
#include <limits>
#include <new>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "zpc/analysis.hpp"
#include "zpc/dynamics.hpp"
#include "zpc/error.hpp"
#include "zpc/parallel.hpp"
#include "zpc/planner.hpp"
#include "zpc/zernike.hpp"

struct zpc_pattern {
    zpc::TargetPattern value;
};

struct zpc_expansion {
    zpc::ZernikeExpansion value;
};

struct zpc_crystal {
    zpc::IonCrystal value;
};

struct zpc_schedule {
    zpc::PulseSchedule value;
    std::string diagnostics;
};

struct zpc_result {
    zpc::EvolutionResult value;
};

namespace {

thread_local std::string g_last_error;

template <class Body>
zpc_status guard(Body &&body) {
    try {
        body();
        g_last_error.clear();
        return ZPC_OK;
    } catch (const zpc::Error &e) {
        g_last_error = e.what();
        switch (e.code()) {
            case zpc::ErrorCode::kInvalidArgument:
                return ZPC_ERR_INVALID_ARGUMENT;
            case zpc::ErrorCode::kNumerical:
                return ZPC_ERR_NUMERICAL;
            case zpc::ErrorCode::kPrecompensationRange:
                return ZPC_ERR_PRECOMPENSATION;
            case zpc::ErrorCode::kIo:
                return ZPC_ERR_IO;
        }
        return ZPC_ERR_INTERNAL;
    } catch (const std::bad_alloc &) {
        g_last_error = "out of memory";
        return ZPC_ERR_INTERNAL;
    } catch (const std::exception &e) {
        g_last_error = e.what();
        return ZPC_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return ZPC_ERR_INTERNAL;
    }
}

template <class T>
void need(const T *p, const char *what) {
    zpc::require(p != nullptr, std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char *zpc_version(void) {
    return "1.0.0";
}

const char *zpc_last_error(void) {
    return g_last_error.c_str();
}

zpc_status zpc_set_threads(int count) {
    return guard([&] { zpc::set_thread_count(count); });
}

zpc_status zpc_bessel_j(int order, double x, double *out) {
    return guard([&] {
        need(out, "out");
        *out = zpc::bessel_j(order, x);
    });
}

zpc_status zpc_inverse_j1(double y, double *out) {
    return guard([&] {
        need(out, "out");
        *out = zpc::inverse_j1(y);
    });
}

zpc_status zpc_zernike_radial(int n, int m, double rho, double *out) {
    return guard([&] {
        need(out, "out");
        *out = zpc::zernike_radial(zpc::ZernikeIndex(n, m), rho);
    });
}

zpc_status zpc_zernike_eval(int n, int m, double rho, double phi, double *out) {
    return guard([&] {
        need(out, "out");
        *out = zpc::zernike_eval(zpc::ZernikeIndex(n, m), rho, phi);
    });
}

zpc_status zpc_pattern_annulus(double amplitude, double r1, double r2, double kappa, zpc_pattern **out) {
    return guard([&] {
        need(out, "out");
        *out = new zpc_pattern{zpc::TargetPattern::annulus(amplitude, r1, r2, kappa)};
    });
}

zpc_status zpc_pattern_elliptical(double amplitude, double eta_x, double eta_y, zpc_pattern **out) {
    return guard([&] {
        need(out, "out");
        *out = new zpc_pattern{zpc::TargetPattern::elliptical_gaussian(amplitude, eta_x, eta_y)};
    });
}

zpc_status zpc_pattern_displaced(double amplitude, double eta, double delta_x, double delta_y, zpc_pattern **out) {
    return guard([&] {
        need(out, "out");
        *out = new zpc_pattern{zpc::TargetPattern::displaced_gaussian(amplitude, eta, delta_x, delta_y)};
    });
}

zpc_status zpc_pattern_load_csv(const char *path, double amplitude, zpc_pattern **out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        std::optional<double> a;
        if (amplitude > 0.0) {
            a = amplitude;
        }
        *out = new zpc_pattern{zpc::TargetPattern::load_csv(path, a)};
    });
}

zpc_status zpc_pattern_eval(const zpc_pattern *pattern, double rho, double phi, double *out) {
    return guard([&] {
        need(pattern, "pattern");
        need(out, "out");
        *out = pattern->value(rho, phi);
    });
}

zpc_status zpc_pattern_amplitude(const zpc_pattern *pattern, double *amplitude, double *peak) {
    return guard([&] {
        need(pattern, "pattern");
        if (amplitude) {
            *amplitude = pattern->value.amplitude();
        }
        if (peak) {
            *peak = pattern->value.peak();
        }
    });
}

void zpc_pattern_free(zpc_pattern *pattern) {
    delete pattern;
}

zpc_status zpc_crystal_hex(int shells, double spacing, double omega, double orientation, zpc_crystal **out) {
    return guard([&] {
        need(out, "out");
        *out = new zpc_crystal{zpc::generate_hex_crystal(shells, spacing, omega, orientation)};
    });
}

zpc_status zpc_crystal_load_csv(const char *path, double omega, zpc_crystal **out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new zpc_crystal{zpc::IonCrystal::load_csv(path, omega)};
    });
}

zpc_status zpc_crystal_save_csv(const zpc_crystal *crystal, const char *path) {
    return guard([&] {
        need(crystal, "crystal");
        need(path, "path");
        crystal->value.save_csv(path);
    });
}

zpc_status zpc_crystal_size(const zpc_crystal *crystal, size_t *out) {
    return guard([&] {
        need(crystal, "crystal");
        need(out, "out");
        *out = crystal->value.size();
    });
}

zpc_status zpc_crystal_position(const zpc_crystal *crystal, size_t index, double *rho, double *phi) {
    return guard([&] {
        need(crystal, "crystal");
        zpc::require(index < crystal->value.size(), "ion index out of range");
        if (rho) {
            *rho = crystal->value[index].rho;
        }
        if (phi) {
            *phi = crystal->value[index].phi;
        }
    });
}

void zpc_crystal_free(zpc_crystal *crystal) {
    delete crystal;
}

zpc_status zpc_decompose(const zpc_pattern *pattern, int n_max, int m_max, double rel_tol, zpc_expansion **out) {
    return guard([&] {
        need(pattern, "pattern");
        need(out, "out");
        zpc::DiskQuadratureSpec spec;
        if (rel_tol > 0.0) {
            spec.rel_tol = rel_tol;
        }
        *out = new zpc_expansion{zpc::decompose(pattern->value, n_max, m_max, spec)};
    });
}

zpc_status zpc_expansion_load_json(const char *path, zpc_expansion **out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new zpc_expansion{zpc::ZernikeExpansion::load_json(path)};
    });
}

zpc_status zpc_expansion_save_json(const zpc_expansion *expansion, const char *path) {
    return guard([&] {
        need(expansion, "expansion");
        need(path, "path");
        expansion->value.save_json(path);
    });
}

zpc_status zpc_expansion_coefficient(const zpc_expansion *expansion, int n, int m, double *out) {
    return guard([&] {
        need(expansion, "expansion");
        need(out, "out");
        *out = expansion->value.coefficient(n, m);
    });
}

zpc_status zpc_expansion_reconstruct(const zpc_expansion *expansion, double rho, double phi, double *out) {
    return guard([&] {
        need(expansion, "expansion");
        need(out, "out");
        *out = expansion->value.reconstruct(rho, phi);
    });
}

zpc_status zpc_expansion_term_count(const zpc_expansion *expansion, size_t *out) {
    return guard([&] {
        need(expansion, "expansion");
        need(out, "out");
        size_t n = 0;
        for (const auto &[idx, alpha] : expansion->value.coefficients()) {
            if (std::fabs(alpha) >= zpc::kCoefficientFloor) {
                ++n;
            }
        }
        *out = n;
    });
}

void zpc_expansion_free(zpc_expansion *expansion) {
    delete expansion;
}

zpc_status zpc_error_map_save(const zpc_pattern *pattern, const zpc_expansion *expansion, const zpc_crystal *crystal,
                              int n_rho, int n_phi, const char *path, double *disk_max, double *ion_max) {
    return guard([&] {
        need(pattern, "pattern");
        need(expansion, "expansion");
        need(path, "path");
        std::span<const zpc::PolarPoint> ions;
        if (crystal) {
            ions = crystal->value.positions();
        }
        const auto map = zpc::truncation_error_map(pattern->value, expansion->value, n_rho, n_phi, ions);
        map.save_csv(path);
        if (disk_max) {
            *disk_max = map.disk_max;
        }
        if (ion_max) {
            *ion_max = map.ion_max;
        }
    });
}

zpc_status zpc_plan(const zpc_expansion *expansion, zpc_mode mode, double strength, double omega, double psi,
                    int rotations, double dm_reset_time, zpc_schedule **out) {
    return guard([&] {
        need(expansion, "expansion");
        need(out, "out");
        if (mode == ZPC_MODE_SERIAL) {
            zpc::SerialOptions o;
            o.strength = strength;
            o.omega = omega;
            o.psi = psi;
            o.segment_rotations = rotations;
            o.dm_reset_time = dm_reset_time;
            *out = new zpc_schedule{zpc::plan_serial(expansion->value, o), {}};
        } else if (mode == ZPC_MODE_PARALLEL) {
            zpc::ParallelOptions o;
            o.strength = strength;
            o.omega = omega;
            o.psi = psi;
            o.total_rotations = rotations;
            o.dm_reset_time = dm_reset_time;
            *out = new zpc_schedule{zpc::plan_parallel(expansion->value, o), {}};
        } else {
            zpc::fail(zpc::ErrorCode::kInvalidArgument, "unknown schedule mode");
        }
    });
}

zpc_status zpc_schedule_load_json(const char *path, zpc_schedule **out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new zpc_schedule{zpc::PulseSchedule::load_json(path), {}};
    });
}

zpc_status zpc_schedule_save_json(const zpc_schedule *schedule, const char *path) {
    return guard([&] {
        need(schedule, "schedule");
        need(path, "path");
        schedule->value.save_json(path);
    });
}

zpc_status zpc_schedule_segment_count(const zpc_schedule *schedule, size_t *out) {
    return guard([&] {
        need(schedule, "schedule");
        need(out, "out");
        *out = schedule->value.segments.size();
    });
}

zpc_status zpc_schedule_times(const zpc_schedule *schedule, double *pulse_time, double *wall_time) {
    return guard([&] {
        need(schedule, "schedule");
        if (pulse_time) {
            *pulse_time = schedule->value.pulse_time();
        }
        if (wall_time) {
            *wall_time = schedule->value.wall_time();
        }
    });
}

zpc_status zpc_schedule_omega(const zpc_schedule *schedule, double *out) {
    return guard([&] {
        need(schedule, "schedule");
        need(out, "out");
        *out = schedule->value.omega;
    });
}

zpc_status zpc_schedule_validate(zpc_schedule *schedule, double omega, const char **json_out, int *warning_count) {
    return guard([&] {
        need(schedule, "schedule");
        const auto d = zpc::validate_schedule(schedule->value, omega);
        schedule->diagnostics = d.to_json();
        if (json_out) {
            *json_out = schedule->diagnostics.c_str();
        }
        if (warning_count) {
            *warning_count = static_cast<int>(d.warnings.size());
        }
    });
}

void zpc_schedule_free(zpc_schedule *schedule) {
    delete schedule;
}

zpc_status zpc_evolve(const zpc_crystal *crystal, const zpc_schedule *schedule, zpc_method method, double tolerance,
                      int n_terms, zpc_result **out) {
    return guard([&] {
        need(crystal, "crystal");
        need(schedule, "schedule");
        need(out, "out");
        switch (method) {
            case ZPC_METHOD_EXACT:
                *out = new zpc_result{zpc::evolve_exact(crystal->value, schedule->value, tolerance)};
                return;
            case ZPC_METHOD_BESSEL:
                *out = new zpc_result{zpc::evolve_exact_bessel(crystal->value, schedule->value, n_terms)};
                return;
            case ZPC_METHOD_RWA:
                *out = new zpc_result{zpc::evolve_rwa(crystal->value, schedule->value)};
                return;
        }
        zpc::fail(zpc::ErrorCode::kInvalidArgument, "unknown evolution method");
    });
}

zpc_status zpc_result_set_target(zpc_result *result, const zpc_crystal *crystal, const zpc_pattern *pattern,
                                 const zpc_schedule *schedule) {
    return guard([&] {
        need(result, "result");
        need(crystal, "crystal");
        need(pattern, "pattern");
        need(schedule, "schedule");
        result->value.set_target(zpc::target_phases(crystal->value, pattern->value, schedule->value));
    });
}

zpc_status zpc_result_size(const zpc_result *result, size_t *out) {
    return guard([&] {
        need(result, "result");
        need(out, "out");
        *out = result->value.size();
    });
}

zpc_status zpc_result_ion(const zpc_result *result, size_t index, double *theta, double *sigma_x, double *sigma_y,
                          double *theta_target, double *infidelity) {
    return guard([&] {
        need(result, "result");
        const auto &r = result->value;
        zpc::require(index < r.size(), "ion index out of range");
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const bool has_target = r.theta_target.size() == r.size();
        if (theta) {
            *theta = r.theta[index];
        }
        if (sigma_x) {
            *sigma_x = r.sigma_x[index];
        }
        if (sigma_y) {
            *sigma_y = r.sigma_y[index];
        }
        if (theta_target) {
            *theta_target = has_target ? r.theta_target[index] : nan;
        }
        if (infidelity) {
            *infidelity = has_target ? r.infidelity[index] : nan;
        }
    });
}

zpc_status zpc_result_max_infidelity(const zpc_result *result, double *out) {
    return guard([&] {
        need(result, "result");
        need(out, "out");
        zpc::require(!result->value.infidelity.empty(), "result has no target phases");
        *out = result->value.max_infidelity();
    });
}

zpc_status zpc_result_save(const zpc_result *result, const char *csv_path, const char *metadata_path) {
    return guard([&] {
        need(result, "result");
        need(csv_path, "csv_path");
        result->value.save_csv(csv_path);
        if (metadata_path) {
            result->value.save_metadata(metadata_path);
        }
    });
}

zpc_status zpc_result_save_histogram(const zpc_result *result, const char *path) {
    return guard([&] {
        need(result, "result");
        need(path, "path");
        zpc::require(!result->value.infidelity.empty(), "result has no target phases");
        zpc::Histogram::of(result->value.infidelity).save_csv(path);
    });
}

void zpc_result_free(zpc_result *result) {
    delete result;
}

double zpc_infidelity(double theta, double theta_target) {
    return zpc::infidelity(theta, theta_target);
}

double zpc_truncation_bound(double error, double strength, double amplitude, double time) {
    const double x = error * strength * amplitude * time;
    return x * x;
}

double zpc_e_requirement(double eps) {
    return eps < 0.0 ? std::numeric_limits<double>::quiet_NaN() : zpc::e_requirement(eps);
}

double zpc_linear_bound(double amplitude) {
    const double x = std::numbers::pi * amplitude / 2.0;
    return x * x;
}

zpc_status zpc_rwa_study(const double *omegas, size_t omega_count, double strength, double amplitude, int m,
                         int samples, double t_max, double tolerance, const char *out_dir) {
    return guard([&] {
        need(omegas, "omegas");
        need(out_dir, "out_dir");
        zpc::RwaStudyOptions o;
        o.omegas.assign(omegas, omegas + omega_count);
        o.strength = strength;
        o.amplitude = amplitude;
        o.m = m;
        o.samples = samples;
        o.t_max = t_max;
        o.tolerance = tolerance;
        zpc::rwa_study(o).save(out_dir);
    });
}

zpc_status zpc_run_scenario(const char *name, zpc_mode mode, int tier, double tolerance, const char *out_dir,
                            double *max_infidelity, int *passed) {
    return guard([&] {
        need(name, "name");
        const auto spec = zpc::scenario_spec(
            name, mode == ZPC_MODE_PARALLEL ? zpc::ScheduleMode::kParallel : zpc::ScheduleMode::kSerial, tier);
        zpc::ScenarioOptions options;
        options.tolerance = tolerance;
        const auto run = zpc::run_scenario(spec, options);
        if (out_dir) {
            run.save(out_dir);
        }
        if (max_infidelity) {
            *max_infidelity = run.report.max_infidelity;
        }
        if (passed) {
            *passed = run.report.passed ? 1 : 0;
        }
    });
}

zpc_status zpc_reproduce(const char *figure, double tolerance, const char *out_dir, int *passed) {
    return guard([&] {
        need(figure, "figure");
        need(out_dir, "out_dir");
        zpc::ScenarioOptions options;
        options.tolerance = tolerance;
        const bool ok = zpc::reproduce(figure, out_dir, options);
        if (passed) {
            *passed = ok ? 1 : 0;
        }
    });
}

}  // extern "C"
