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


#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zpc/crystal.hpp"
#include "zpc/dynamics.hpp"
#include "zpc/patterns.hpp"
#include "zpc/planner.hpp"
#include "zpc/zernike.hpp"

namespace zpc {

/// Counts of log10(value) in fixed-width bins on [min_log10, 0]. Values at or
/// below 10^min_log10 (including exact zeros) land in the first bin, values
/// above 1 in the last, so counts always sum to the number of values.
struct Histogram {
    double min_log10 = -16.0;
    double bin_width = 0.25;
    std::vector<double> bin_left;
    std::vector<long> counts;
    long total = 0;

    static Histogram of(std::span<const double> values, double min_log10 = -16.0, double bin_width = 0.25);
    /// bin_left_log10,count
    void save_csv(const std::filesystem::path &path) const;
};

/// (E U A T)^2.
double truncation_bound(double error, double strength, double amplitude, double time);
/// Largest truncation error compatible with infidelity eps for a pi-calibrated
/// rotation (U A T = pi / 2): (2 / pi) sqrt(eps).
double e_requirement(double eps);
/// (pi A / 2)^2.
double linear_bound(double amplitude);

struct StudyReport {
    std::string id;
    std::string mode;
    double threshold = 0.0;
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<std::pair<std::string, double>> metrics;

    EvolutionResult evolution;
    Histogram histogram;
    double max_infidelity = 0.0;
    bool passed = false;

    double error_disk_max = 0.0;
    double error_ion_max = 0.0;
    double gate_time = 0.0;
    double wall_time = 0.0;
    double truncation_bound = 0.0;
    double linear_bound = 0.0;
    /// max_infidelity <= 2 (truncation_bound + linear_bound).
    bool bound_consistent = false;

    std::string to_json() const;
};

struct RwaStudyOptions {
    std::vector<double> omegas;  // rad/s
    double strength = 0.0;       // U, rad/s
    double amplitude = 0.25;
    int m = 1;
    int samples = 1000;
    /// 0 selects 2.5 times the RWA pi-rotation time.
    double t_max = 0.0;
    double tolerance = 1e-12;
    double psi = -std::numbers::pi / 2;
};

struct RwaSeries {
    double omega = 0.0;
    std::vector<double> times;
    std::vector<double> sigma_x_exact;
    std::vector<double> sigma_x_rwa;
    std::vector<double> infidelity;
    /// Integer multiples of 2 pi / omega within the window.
    std::vector<double> commensurate_times;
    std::vector<double> commensurate_infidelity;
    Histogram histogram;
    double max_infidelity = 0.0;
    double max_commensurate_infidelity = 0.0;
};

struct RwaStudy {
    RwaStudyOptions options;
    double t_max = 0.0;
    std::vector<RwaSeries> series;

    /// rwa_timeseries.csv, histogram.csv, report.json.
    void save(const std::filesystem::path &dir) const;
};

/// delta = A rho^m cos(m phi_lab) with beatnote m omega at (rho, phi) = (1, 0):
/// exact versus RWA sigma_x at uniformly spaced times in (0, t_max].
RwaStudy rwa_study(const RwaStudyOptions &options);

/// Two-order comb (m1, 2 m1) with unit radial profiles rho^m, evolved exactly
/// and compared with the first-order target.
StudyReport worst_case_parallel_pair(int m1, double amplitude, double strength, double time, const IonCrystal &crystal,
                                     double second_amplitude = -1.0);

struct ScenarioSpec {
    std::string name;  // annulus | elliptical | displaced
    ScheduleMode mode = ScheduleMode::kSerial;
    int tier = 1;  // 1: 1e-2 target, 2: 1e-3 (3e-3 for elliptical parallel)
    double threshold = 1e-2;
    TargetPattern pattern = TargetPattern::annulus(1.0, 0.45, 0.55, 10.0);
    int n_max = 0;
    int m_max = 0;
    int rotations = 0;  // per segment (serial) or total (parallel)
    double strength = 2.0 * std::numbers::pi * 10e3;
    double omega = 2.0 * std::numbers::pi * 180e3;
    int shells = 5;
    double spacing = 0.2;
    double orientation = 0.0;
    double dm_reset_time = 0.0;
};

/// Parameter sets of the reference case studies. tier is 1 or 2.
ScenarioSpec scenario_spec(const std::string &name, ScheduleMode mode, int tier);

struct ScenarioOptions {
    double tolerance = 1e-12;
    DiskQuadratureSpec quadrature;
    int map_rho = 256;
    int map_phi = 512;
};

struct ScenarioRun {
    ScenarioSpec spec;
    ZernikeExpansion expansion;
    PulseSchedule schedule;
    TruncationErrorMap error_map;
    StudyReport report;

    /// report.json, histogram.csv, evolution.csv (+ evolution.json),
    /// error_map.csv, expansion.json, schedule.json, crystal.csv.
    void save(const std::filesystem::path &dir) const;
};

/// pattern -> decompose -> plan -> evolve_exact -> infidelity versus target.
ScenarioRun run_scenario(const ScenarioSpec &spec, const ScenarioOptions &options = {});

/// Figure ids fig2 .. fig12.
std::vector<std::string> figure_ids();

/// Runs the study bound to a figure id, writing one subdirectory per run plus
/// index.json. Returns true when every run met its threshold.
bool reproduce(const std::string &figure, const std::filesystem::path &dir, const ScenarioOptions &options = {});

}  // namespace zpc
