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


#include "zpc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"
#include "zpc/error.hpp"

namespace zpc {

using nlohmann::json;

namespace {

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write " + path.string());
    }
    out << text << "\n";
}

void ensure_dir(const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        fail(ErrorCode::kIo, "cannot create output directory " + dir.string());
    }
}

json pairs_to_json(const std::vector<std::pair<std::string, double>> &pairs) {
    json j = json::object();
    for (const auto &[k, v] : pairs) {
        j[k] = v;
    }
    return j;
}

json histogram_json(const Histogram &h) {
    json bins = json::array();
    for (size_t i = 0; i < h.counts.size(); ++i) {
        if (h.counts[i] > 0) {
            bins.push_back({{"bin_left_log10", h.bin_left[i]}, {"count", h.counts[i]}});
        }
    }
    return bins;
}

}  // namespace

Histogram Histogram::of(std::span<const double> values, double min_log10, double bin_width) {
    require(min_log10 < 0.0 && bin_width > 0.0, "histogram needs min_log10 < 0 and a positive bin width");
    Histogram h;
    h.min_log10 = min_log10;
    h.bin_width = bin_width;
    const int bins = static_cast<int>(std::ceil(-min_log10 / bin_width - 1e-9));
    for (int i = 0; i < bins; ++i) {
        h.bin_left.push_back(min_log10 + i * bin_width);
    }
    h.counts.assign(static_cast<size_t>(bins), 0);
    for (double v : values) {
        int idx = 0;
        if (v > 0.0) {
            idx = static_cast<int>(std::floor((std::log10(v) - min_log10) / bin_width));
        }
        idx = std::clamp(idx, 0, bins - 1);
        ++h.counts[static_cast<size_t>(idx)];
        ++h.total;
    }
    return h;
}

void Histogram::save_csv(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write " + path.string());
    }
    out << "bin_left_log10,count\n";
    char buf[64];
    for (size_t i = 0; i < counts.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%ld\n", bin_left[i], counts[i]);
        out << buf;
    }
}

double truncation_bound(double error, double strength, double amplitude, double time) {
    require(error >= 0.0 && strength >= 0.0 && amplitude >= 0.0 && time >= 0.0,
            "truncation_bound inputs must be non-negative");
    const double x = error * strength * amplitude * time;
    return x * x;
}

double e_requirement(double eps) {
    require(eps >= 0.0, "infidelity target must be non-negative");
    return 2.0 / std::numbers::pi * std::sqrt(eps);
}

double linear_bound(double amplitude) {
    require(amplitude >= 0.0, "amplitude must be non-negative");
    const double x = std::numbers::pi * amplitude / 2.0;
    return x * x;
}

std::string StudyReport::to_json() const {
    json j;
    j["id"] = id;
    j["mode"] = mode;
    j["threshold"] = threshold;
    j["parameters"] = pairs_to_json(parameters);
    j["metrics"] = pairs_to_json(metrics);
    j["ion_count"] = evolution.size();
    j["max_infidelity"] = max_infidelity;
    j["passed"] = passed;
    j["truncation_error"] = {{"disk_max", error_disk_max}, {"ion_max", error_ion_max}};
    j["gate_time_s"] = gate_time;
    j["wall_time_s"] = wall_time;
    j["bounds"] = {{"truncation", truncation_bound},
                   {"linear", linear_bound},
                   {"consistent", bound_consistent}};
    j["histogram"] = histogram_json(histogram);
    return j.dump(2);
}

RwaStudy rwa_study(const RwaStudyOptions &options) {
    require(!options.omegas.empty(), "rwa_study needs at least one omega");
    require(options.strength > 0.0, "rwa_study strength must be positive");
    require(options.amplitude > 0.0, "rwa_study amplitude must be positive");
    require(options.m >= 1, "rwa_study order m must be at least 1");
    require(options.samples >= 1, "rwa_study needs at least one sample");
    require(options.tolerance >= 1e-13, "integration tolerance must be at least 1e-13");

    PulseSegment seg;
    seg.psi = options.psi;
    seg.strength = options.strength;
    seg.beatnotes = {Beatnote{options.m, 1.0}};
    MirrorComponent c;
    c.m = options.m;
    c.even.m = options.m;
    c.even.scale = options.amplitude;
    c.even.terms = {1.0};  // R_m^m = rho^m
    c.odd.m = options.m;
    seg.deformation.components.push_back(c);
    const PolarPoint ion{1.0, 0.0};

    RwaStudy study;
    study.options = options;
    const double c_ref = std::fabs(segment_rwa_coefficient(seg, ion, options.omegas.front()));
    require(c_ref > 0.0 || options.t_max > 0.0, "rwa_study: RWA coefficient vanishes; give t_max explicitly");
    study.t_max = options.t_max > 0.0 ? options.t_max : 2.5 * std::numbers::pi / (2.0 * c_ref);
    seg.duration = study.t_max;

    for (double omega : options.omegas) {
        require(omega > 0.0, "rwa_study omegas must be positive");
        RwaSeries s;
        s.omega = omega;
        const double coeff = segment_rwa_coefficient(seg, ion, omega);
        double theta = 0.0;
        double t_prev = 0.0;
        for (int k = 1; k <= options.samples; ++k) {
            const double t = study.t_max * k / options.samples;
            theta += 2.0 * segment_integral_exact(seg, ion, omega, t_prev, t, options.tolerance);
            t_prev = t;
            const double theta_rwa = 2.0 * coeff * t;
            s.times.push_back(t);
            s.sigma_x_exact.push_back(std::cos(theta));
            s.sigma_x_rwa.push_back(std::cos(theta_rwa));
            s.infidelity.push_back(infidelity(theta, theta_rwa));
            s.max_infidelity = std::max(s.max_infidelity, s.infidelity.back());
        }
        const double period = 2.0 * std::numbers::pi / omega;
        theta = 0.0;
        t_prev = 0.0;
        for (int r = 1; r * period <= study.t_max * (1.0 + 1e-12); ++r) {
            const double t = std::min(r * period, study.t_max);
            theta += 2.0 * segment_integral_exact(seg, ion, omega, t_prev, t, options.tolerance);
            t_prev = t;
            s.commensurate_times.push_back(t);
            s.commensurate_infidelity.push_back(infidelity(theta, 2.0 * coeff * t));
            s.max_commensurate_infidelity = std::max(s.max_commensurate_infidelity, s.commensurate_infidelity.back());
        }
        s.histogram = Histogram::of(s.infidelity);
        study.series.push_back(std::move(s));
    }
    return study;
}

void RwaStudy::save(const std::filesystem::path &dir) const {
    ensure_dir(dir);
    {
        std::ofstream out(dir / "rwa_timeseries.csv");
        if (!out) {
            fail(ErrorCode::kIo, "cannot write " + (dir / "rwa_timeseries.csv").string());
        }
        out << "omega_rad_s,t_s,sigma_x_exact,sigma_x_rwa,infidelity\n";
        char buf[256];
        for (const auto &s : series) {
            for (size_t i = 0; i < s.times.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.omega, s.times[i],
                              s.sigma_x_exact[i], s.sigma_x_rwa[i], s.infidelity[i]);
                out << buf;
            }
        }
    }
    {
        std::ofstream out(dir / "rwa_commensurate.csv");
        if (!out) {
            fail(ErrorCode::kIo, "cannot write " + (dir / "rwa_commensurate.csv").string());
        }
        out << "omega_rad_s,t_s,infidelity\n";
        char buf[128];
        for (const auto &s : series) {
            for (size_t i = 0; i < s.commensurate_times.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.omega, s.commensurate_times[i],
                              s.commensurate_infidelity[i]);
                out << buf;
            }
        }
    }
    {
        std::ofstream out(dir / "histogram.csv");
        if (!out) {
            fail(ErrorCode::kIo, "cannot write " + (dir / "histogram.csv").string());
        }
        out << "omega_rad_s,bin_left_log10,count\n";
        char buf[128];
        for (const auto &s : series) {
            for (size_t i = 0; i < s.histogram.counts.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%ld\n", s.omega, s.histogram.bin_left[i],
                              s.histogram.counts[i]);
                out << buf;
            }
        }
    }
    json j;
    j["id"] = "rwa_study";
    j["parameters"] = {{"U_rad_s", options.strength}, {"A", options.amplitude},       {"m", options.m},
                       {"samples", options.samples},  {"t_max_s", t_max},             {"psi", options.psi},
                       {"tolerance", options.tolerance}, {"rho", 1.0}, {"phi", 0.0}};
    json arr = json::array();
    for (const auto &s : series) {
        arr.push_back({{"omega_rad_s", s.omega},
                       {"max_infidelity", s.max_infidelity},
                       {"max_commensurate_infidelity", s.max_commensurate_infidelity},
                       {"commensurate_count", s.commensurate_times.size()},
                       {"histogram", histogram_json(s.histogram)}});
    }
    j["series"] = arr;
    write_text(dir / "report.json", j.dump(2));
}

StudyReport worst_case_parallel_pair(int m1, double amplitude, double strength, double time, const IonCrystal &crystal,
                                     double second_amplitude) {
    require(m1 >= 1, "worst_case_parallel_pair needs m1 >= 1");
    require(amplitude > 0.0 && strength > 0.0 && time > 0.0, "worst_case_parallel_pair inputs must be positive");
    const double a2 = second_amplitude < 0.0 ? amplitude : second_amplitude;
    PulseSegment seg;
    seg.strength = strength;
    seg.duration = time;
    auto component = [](int m, double scale) {
        MirrorComponent c;
        c.m = m;
        c.even.m = m;
        c.even.scale = scale;
        c.even.terms = {1.0};
        c.odd.m = m;
        return c;
    };
    seg.deformation.components.push_back(component(m1, amplitude));
    seg.beatnotes.push_back(Beatnote{m1, 1.0});
    if (a2 > 0.0) {
        seg.deformation.components.push_back(component(2 * m1, a2));
        seg.beatnotes.push_back(Beatnote{2 * m1, 1.0});
    }
    PulseSchedule schedule;
    schedule.mode = ScheduleMode::kParallel;
    schedule.omega = crystal.omega();
    schedule.calibration = {strength, time, amplitude, amplitude};
    schedule.segments.push_back(seg);

    StudyReport report;
    report.id = "parallel_pair_m" + std::to_string(m1);
    report.mode = "parallel";
    report.parameters = {{"m1", m1}, {"A", amplitude}, {"A2", a2}, {"U_rad_s", strength}, {"T_s", time}};
    report.evolution = evolve_exact(crystal, schedule);
    std::vector<double> target;
    for (const auto &ion : crystal.positions()) {
        target.push_back(2.0 * segment_rwa_coefficient(seg, ion, crystal.omega()) * time);
    }
    report.evolution.set_target(target);
    report.max_infidelity = report.evolution.max_infidelity();
    report.histogram = Histogram::of(report.evolution.infidelity);
    report.gate_time = time;
    report.wall_time = time;
    report.linear_bound = zpc::linear_bound(std::max(amplitude, a2));
    report.threshold = report.linear_bound;
    report.passed = report.max_infidelity <= report.linear_bound;
    report.bound_consistent = report.passed;
    return report;
}

ScenarioSpec scenario_spec(const std::string &name, ScheduleMode mode, int tier) {
    require(tier == 1 || tier == 2, "tier must be 1 (1e-2) or 2 (1e-3)");
    ScenarioSpec s;
    s.name = name;
    s.mode = mode;
    s.tier = tier;
    s.threshold = tier == 1 ? 1e-2 : 1e-3;
    const bool serial = mode == ScheduleMode::kSerial;
    if (name == "annulus") {
        require(serial, "the annulus case study is defined for the serial protocol only");
        s.pattern = TargetPattern::annulus(1.0, 0.45, 0.55, 10.0);
        s.n_max = tier == 1 ? 24 : 54;
        s.m_max = 0;
        s.rotations = 0;
    } else if (name == "elliptical") {
        s.n_max = tier == 1 ? 26 : 32;
        s.m_max = tier == 1 ? 10 : 12;
        double a = 0.5;
        if (serial) {
            s.rotations = 18;
        } else {
            a = tier == 1 ? 0.4 : 0.2;
            s.rotations = tier == 1 ? 45 : 90;
            s.threshold = tier == 1 ? 1e-2 : 3e-3;
        }
        s.pattern = TargetPattern::elliptical_gaussian(a, std::sqrt(2.0) / 10.0, std::sqrt(2.0));
    } else if (name == "displaced") {
        s.n_max = 40;
        s.m_max = tier == 1 ? 9 : 20;
        const double a = serial ? 3.0 : 0.3;
        s.rotations = serial ? 3 : 60;
        s.pattern = TargetPattern::displaced_gaussian(a, 0.1 / std::sqrt(2.0), 0.3, 0.1 * std::sqrt(3.0));
    } else {
        fail(ErrorCode::kInvalidArgument, "unknown scenario '" + name + "' (annulus, elliptical, displaced)");
    }
    return s;
}

ScenarioRun run_scenario(const ScenarioSpec &spec, const ScenarioOptions &options) {
    const IonCrystal crystal = generate_hex_crystal(spec.shells, spec.spacing, spec.omega, spec.orientation);
    ZernikeExpansion expansion = decompose(spec.pattern, spec.n_max, spec.m_max, options.quadrature);
    PulseSchedule schedule;
    if (spec.mode == ScheduleMode::kSerial) {
        SerialOptions o;
        o.strength = spec.strength;
        o.omega = spec.omega;
        o.segment_rotations = spec.rotations;
        o.dm_reset_time = spec.dm_reset_time;
        schedule = plan_serial(expansion, o);
    } else {
        ParallelOptions o;
        o.strength = spec.strength;
        o.omega = spec.omega;
        o.total_rotations = spec.rotations;
        o.dm_reset_time = spec.dm_reset_time;
        schedule = plan_parallel(expansion, o);
    }
    TruncationErrorMap map =
        truncation_error_map(spec.pattern, expansion, options.map_rho, options.map_phi, crystal.positions());

    StudyReport r;
    const bool serial = spec.mode == ScheduleMode::kSerial;
    r.id = spec.name + (serial ? "_serial" : "_parallel") + "_tier" + std::to_string(spec.tier);
    r.mode = serial ? "serial" : "parallel";
    r.threshold = spec.threshold;
    const double a = spec.pattern.amplitude();
    r.parameters = {{"A", a},
                    {"peak", spec.pattern.peak()},
                    {"n_max", spec.n_max},
                    {"m_max", spec.m_max},
                    {"rotations", spec.rotations},
                    {"U_rad_s", spec.strength},
                    {"omega_rad_s", spec.omega},
                    {"shells", spec.shells},
                    {"spacing", spec.spacing},
                    {"orientation_rad", spec.orientation},
                    {"segments", static_cast<double>(schedule.segments.size())},
                    {"effective_time_s", schedule.calibration.effective_time},
                    {"tolerance", options.tolerance}};
    r.evolution = evolve_exact(crystal, schedule, options.tolerance);
    r.evolution.set_target(target_phases(crystal, spec.pattern, schedule));
    r.max_infidelity = r.evolution.max_infidelity();
    r.passed = r.max_infidelity < spec.threshold;
    r.histogram = Histogram::of(r.evolution.infidelity);
    r.error_disk_max = map.disk_max;
    r.error_ion_max = map.ion_max;
    r.gate_time = schedule.pulse_time();
    r.wall_time = schedule.wall_time();
    r.truncation_bound = truncation_bound(map.ion_max, spec.strength, spec.pattern.peak(),
                                          schedule.calibration.effective_time);
    r.linear_bound = serial ? 0.0 : linear_bound(a);
    r.bound_consistent = r.max_infidelity <= 2.0 * (r.truncation_bound + r.linear_bound);

    double min_sx = 1.0;
    double max_sx = -1.0;
    for (double sx : r.evolution.sigma_x) {
        min_sx = std::min(min_sx, sx);
        max_sx = std::max(max_sx, sx);
    }
    r.metrics = {{"min_sigma_x", min_sx}, {"max_sigma_x", max_sx}};
    if (const auto *d = std::get_if<DisplacedGaussianShape>(&spec.pattern.shape())) {
        // Ion nearest the peak, and the least-flipped ion beyond two spacings.
        size_t target = 0;
        double best = 1e300;
        for (size_t i = 0; i < crystal.size(); ++i) {
            const auto p = lab_position(crystal[i], 0.0, spec.omega);
            const double dist = std::hypot(p.x - d->delta_x, p.y - d->delta_y);
            if (dist < best) {
                best = dist;
                target = i;
            }
        }
        const auto tp = lab_position(crystal[target], 0.0, spec.omega);
        double far_min = 1.0;
        for (size_t i = 0; i < crystal.size(); ++i) {
            const auto p = lab_position(crystal[i], 0.0, spec.omega);
            if (std::hypot(p.x - tp.x, p.y - tp.y) > 2.0 * spec.spacing + 1e-9) {
                far_min = std::min(far_min, r.evolution.sigma_x[i]);
            }
        }
        r.metrics.push_back({"target_ion_index", static_cast<double>(target)});
        r.metrics.push_back({"target_ion_sigma_x", r.evolution.sigma_x[target]});
        r.metrics.push_back({"far_ions_min_sigma_x", far_min});
    }
    return ScenarioRun{spec, std::move(expansion), std::move(schedule), std::move(map), std::move(r)};
}

void ScenarioRun::save(const std::filesystem::path &dir) const {
    ensure_dir(dir);
    write_text(dir / "report.json", report.to_json());
    report.histogram.save_csv(dir / "histogram.csv");
    report.evolution.save_csv(dir / "evolution.csv");
    report.evolution.save_metadata(dir / "evolution.json");
    error_map.save_csv(dir / "error_map.csv");
    expansion.save_json(dir / "expansion.json");
    schedule.save_json(dir / "schedule.json");
    generate_hex_crystal(spec.shells, spec.spacing, spec.omega, spec.orientation).save_csv(dir / "crystal.csv");
}

namespace {

struct FigureJob {
    std::string scenario;  // empty: RWA study
    ScheduleMode mode = ScheduleMode::kSerial;
    std::vector<int> tiers;
};

const std::map<std::string, FigureJob> &figure_table() {
    static const std::map<std::string, FigureJob> table = {
        {"fig2", {"", ScheduleMode::kSerial, {}}},
        {"fig3", {"annulus", ScheduleMode::kSerial, {1}}},
        {"fig4", {"annulus", ScheduleMode::kSerial, {1, 2}}},
        {"fig5", {"annulus", ScheduleMode::kSerial, {1, 2}}},
        {"fig6", {"elliptical", ScheduleMode::kSerial, {1}}},
        {"fig7", {"elliptical", ScheduleMode::kSerial, {1, 2}}},
        {"fig8", {"elliptical", ScheduleMode::kParallel, {1, 2}}},
        {"fig9", {"displaced", ScheduleMode::kSerial, {1, 2}}},
        {"fig10", {"displaced", ScheduleMode::kSerial, {1}}},
        {"fig11", {"displaced", ScheduleMode::kSerial, {1, 2}}},
        {"fig12", {"displaced", ScheduleMode::kParallel, {1, 2}}},
    };
    return table;
}

}  // namespace

std::vector<std::string> figure_ids() {
    std::vector<std::string> ids;
    for (int i = 2; i <= 12; ++i) {
        ids.push_back("fig" + std::to_string(i));
    }
    return ids;
}

bool reproduce(const std::string &figure, const std::filesystem::path &dir, const ScenarioOptions &options) {
    const auto &table = figure_table();
    const auto it = table.find(figure);
    if (it == table.end()) {
        fail(ErrorCode::kInvalidArgument, "unknown figure id '" + figure + "' (expected fig2 .. fig12)");
    }
    ensure_dir(dir);
    const FigureJob &job = it->second;
    json index;
    index["figure"] = figure;
    json runs = json::array();
    bool all_passed = true;
    if (job.scenario.empty()) {
        RwaStudyOptions o;
        o.omegas = {2.0 * std::numbers::pi * 43.8e3, 2.0 * std::numbers::pi * 180e3};
        o.strength = 2.0 * std::numbers::pi * 10e3;
        o.tolerance = options.tolerance;
        const RwaStudy study = rwa_study(o);
        study.save(dir / "rwa");
        for (const auto &s : study.series) {
            runs.push_back({{"dir", "rwa"},
                            {"omega_rad_s", s.omega},
                            {"max_infidelity", s.max_infidelity},
                            {"max_commensurate_infidelity", s.max_commensurate_infidelity}});
        }
    } else {
        for (int tier : job.tiers) {
            const ScenarioSpec spec = scenario_spec(job.scenario, job.mode, tier);
            const ScenarioRun run = run_scenario(spec, options);
            const std::string sub =
                std::string(job.mode == ScheduleMode::kSerial ? "serial" : "parallel") + "_tier" + std::to_string(tier);
            run.save(dir / sub);
            all_passed = all_passed && run.report.passed;
            runs.push_back({{"dir", sub},
                            {"id", run.report.id},
                            {"max_infidelity", run.report.max_infidelity},
                            {"threshold", run.report.threshold},
                            {"passed", run.report.passed}});
        }
    }
    index["runs"] = runs;
    index["passed"] = all_passed;
    write_text(dir / "index.json", index.dump(2));
    return all_passed;
}

}  // namespace zpc
