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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "zpc/analysis.hpp"
#include "zpc/error.hpp"

namespace zpc {
namespace {

namespace fs = std::filesystem;

constexpr double kU = 2.0 * std::numbers::pi * 10e3;
constexpr double kOmega = 2.0 * std::numbers::pi * 180e3;

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string &name) {
    const fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

TEST(Bounds, RequirementValues) {
    EXPECT_NEAR(e_requirement(1e-2), 0.064, 5e-4);
    EXPECT_NEAR(e_requirement(1e-3), 0.020, 5e-4);
    EXPECT_EQ(std::round(e_requirement(1e-2) * 1000.0) / 1000.0, 0.064);
    EXPECT_EQ(std::round(e_requirement(1e-3) * 100.0) / 100.0, 0.02);
    EXPECT_THROW(e_requirement(-1.0), Error);
}

TEST(Bounds, RequirementSaturatesTruncationBound) {
    // A pi rotation has U A T = pi / 2, where the required E gives exactly eps.
    const double t = std::numbers::pi / (2.0 * kU);
    for (double eps : {1e-2, 1e-3, 1e-5}) {
        EXPECT_NEAR(truncation_bound(e_requirement(eps), kU, 1.0, t), eps, 1e-15);
    }
}

TEST(Bounds, LinearBound) {
    EXPECT_NEAR(linear_bound(0.06), std::pow(std::numbers::pi * 0.03, 2), 1e-16);
    EXPECT_EQ(linear_bound(0.0), 0.0);
    EXPECT_THROW(linear_bound(-0.1), Error);
}

TEST(Histogram, BinsLogValues) {
    const std::vector<double> v = {0.0, 1e-20, 1e-16, 3e-5, 1e-3, 0.5, 2.0};
    const Histogram h = Histogram::of(v);
    EXPECT_EQ(h.total, 7);
    EXPECT_EQ(h.bin_left.size(), 64u);
    EXPECT_EQ(h.counts.front(), 3);  // zero, underflow and the first edge
    long sum = 0;
    for (long c : h.counts) {
        sum += c;
    }
    EXPECT_EQ(sum, 7);
    const size_t i3 = static_cast<size_t>(std::floor((std::log10(1e-3) + 16.0) / 0.25));
    EXPECT_EQ(h.counts[i3], 1);
    EXPECT_EQ(h.counts[62], 1);     // 0.5
    EXPECT_EQ(h.counts.back(), 1);  // 2.0, clamped
}

TEST(RwaStudy, CommensurateSamplesAreExact) {
    RwaStudyOptions o;
    o.omegas = {2.0 * std::numbers::pi * 43.8e3, kOmega};
    o.strength = kU;
    o.samples = 200;
    const RwaStudy study = rwa_study(o);
    ASSERT_EQ(study.series.size(), 2u);
    for (const auto &s : study.series) {
        EXPECT_EQ(s.times.size(), 200u);
        EXPECT_FALSE(s.commensurate_times.empty());
        EXPECT_LT(s.max_commensurate_infidelity, 1e-9);
        EXPECT_GT(s.max_infidelity, s.max_commensurate_infidelity);
    }
    EXPECT_GT(study.series[0].max_infidelity, study.series[1].max_infidelity);

    const fs::path dir = fresh_dir("zpc_rwa_test");
    study.save(dir);
    for (const char *f : {"rwa_timeseries.csv", "rwa_commensurate.csv", "histogram.csv", "report.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(report.at("series").size(), 2u);
    fs::remove_all(dir);
}

TEST(ParallelPair, StaysInsideLinearBound) {
    const IonCrystal crystal = generate_hex_crystal(5, 0.2, kOmega);
    const double t = 45.0 * 2.0 * std::numbers::pi / kOmega;
    for (int m1 : {1, 2, 3}) {
        const StudyReport r = worst_case_parallel_pair(m1, 0.06, kU, t, crystal);
        EXPECT_TRUE(r.passed) << m1 << " " << r.max_infidelity;
        EXPECT_GT(r.max_infidelity, 0.0);
    }
}

TEST(Scenario, SpecTable) {
    const ScenarioSpec a = scenario_spec("annulus", ScheduleMode::kSerial, 2);
    EXPECT_EQ(a.n_max, 54);
    EXPECT_EQ(a.threshold, 1e-3);
    EXPECT_THROW(scenario_spec("annulus", ScheduleMode::kParallel, 1), Error);
    EXPECT_THROW(scenario_spec("square", ScheduleMode::kSerial, 1), Error);
    EXPECT_THROW(scenario_spec("displaced", ScheduleMode::kSerial, 3), Error);
    const ScenarioSpec e = scenario_spec("elliptical", ScheduleMode::kParallel, 2);
    EXPECT_EQ(e.rotations, 90);
    EXPECT_EQ(e.threshold, 3e-3);
    EXPECT_EQ(e.pattern.amplitude(), 0.2);
    EXPECT_EQ(scenario_spec("displaced", ScheduleMode::kParallel, 1).rotations, 60);
}

TEST(Scenario, AnnulusRunAndDeterministicFiles) {
    const ScenarioRun run = run_scenario(scenario_spec("annulus", ScheduleMode::kSerial, 1));
    EXPECT_TRUE(run.report.passed);
    EXPECT_LT(run.report.max_infidelity, 1e-2);
    EXPECT_NEAR(run.report.gate_time, 25e-6, 1e-12);
    EXPECT_TRUE(run.report.bound_consistent);
    EXPECT_EQ(run.report.evolution.size(), 91u);

    const fs::path a = fresh_dir("zpc_scenario_a");
    const fs::path b = fresh_dir("zpc_scenario_b");
    run.save(a);
    run_scenario(scenario_spec("annulus", ScheduleMode::kSerial, 1)).save(b);
    for (const char *f : {"report.json", "histogram.csv", "evolution.csv", "evolution.json", "error_map.csv",
                          "expansion.json", "schedule.json", "crystal.csv"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    // Every emitted file reads back through its own importer.
    EXPECT_EQ(ZernikeExpansion::load_json(a / "expansion.json").to_json(), run.expansion.to_json());
    EXPECT_EQ(PulseSchedule::load_json(a / "schedule.json").to_json(), run.schedule.to_json());
    EXPECT_EQ(IonCrystal::load_csv(a / "crystal.csv", kOmega).size(), 91u);
    EXPECT_EQ(EvolutionResult::load_csv(a / "evolution.csv").max_infidelity(), run.report.max_infidelity);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Reproduce, FigureIds) {
    const auto ids = figure_ids();
    EXPECT_EQ(ids.size(), 11u);
    EXPECT_EQ(ids.front(), "fig2");
    EXPECT_EQ(ids.back(), "fig12");
    EXPECT_THROW(reproduce("fig99", fs::temp_directory_path() / "zpc_fig99"), Error);
}

TEST(Reproduce, AnnulusFigureWritesIndex) {
    const fs::path dir = fresh_dir("zpc_fig3");
    EXPECT_TRUE(reproduce("fig3", dir));
    const auto index = nlohmann::json::parse(slurp(dir / "index.json"));
    EXPECT_FALSE(index.empty());
    EXPECT_TRUE(fs::exists(dir / "serial_tier1" / "report.json"));
    fs::remove_all(dir);
}

}  // namespace
}  // namespace zpc
