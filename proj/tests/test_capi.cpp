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
#include <string>

#include <gtest/gtest.h>

#include "zpc/zpc.h"

namespace {

namespace fs = std::filesystem;

constexpr double kU = 2.0 * std::numbers::pi * 10e3;
constexpr double kOmega = 2.0 * std::numbers::pi * 180e3;
constexpr double kPsi = -std::numbers::pi / 2;

fs::path fresh_dir(const std::string &name) {
    const fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(CApi, VersionAndScalars) {
    EXPECT_NE(std::string(zpc_version()), "");
    double v = 0.0;
    ASSERT_EQ(zpc_bessel_j(1, 1.0, &v), ZPC_OK);
    EXPECT_NEAR(v, std::cyl_bessel_j(1.0, 1.0), 1e-14);
    ASSERT_EQ(zpc_inverse_j1(v, &v), ZPC_OK);
    EXPECT_NEAR(v, 1.0, 1e-12);
    ASSERT_EQ(zpc_zernike_radial(4, 0, 1.0, &v), ZPC_OK);
    EXPECT_NEAR(v, 1.0, 1e-14);
    ASSERT_EQ(zpc_zernike_eval(2, -2, 1.0, std::numbers::pi / 4, &v), ZPC_OK);
    EXPECT_NEAR(v, 1.0, 1e-14);
    EXPECT_NEAR(zpc_infidelity(std::numbers::pi, 0.0), 1.0, 1e-15);
    EXPECT_NEAR(zpc_e_requirement(1e-2), 2.0 / std::numbers::pi * 0.1, 1e-15);
    EXPECT_NEAR(zpc_linear_bound(0.0), 0.0, 0.0);
    EXPECT_NEAR(zpc_truncation_bound(0.1, 2.0, 1.0, 5.0), 1.0, 1e-15);
}

TEST(CApi, ErrorStatusesAndMessages) {
    double v = 0.0;
    EXPECT_EQ(zpc_zernike_radial(3, 0, 0.5, &v), ZPC_ERR_INVALID_ARGUMENT);
    EXPECT_NE(std::string(zpc_last_error()), "");
    EXPECT_EQ(zpc_inverse_j1(0.9, &v), ZPC_ERR_PRECOMPENSATION);
    EXPECT_EQ(zpc_bessel_j(0, 1.0, nullptr), ZPC_ERR_INVALID_ARGUMENT);
    zpc_expansion *e = nullptr;
    EXPECT_EQ(zpc_expansion_load_json("/nonexistent/e.json", &e), ZPC_ERR_IO);
    EXPECT_EQ(e, nullptr);
    EXPECT_EQ(zpc_set_threads(-1), ZPC_ERR_INVALID_ARGUMENT);
    zpc_pattern_free(nullptr);
    zpc_result_free(nullptr);
}

TEST(CApi, PipelineMatchesReference) {
    ASSERT_EQ(zpc_set_threads(0), ZPC_OK);
    const fs::path dir = fresh_dir("zpc_capi_pipeline");
    zpc_pattern *pattern = nullptr;
    ASSERT_EQ(zpc_pattern_annulus(1.0, 0.45, 0.55, 10.0, &pattern), ZPC_OK);
    double a = 0.0;
    double peak = 0.0;
    ASSERT_EQ(zpc_pattern_amplitude(pattern, &a, &peak), ZPC_OK);
    EXPECT_EQ(a, 1.0);

    zpc_expansion *expansion = nullptr;
    ASSERT_EQ(zpc_decompose(pattern, 24, 0, 0.0, &expansion), ZPC_OK);
    size_t terms = 0;
    ASSERT_EQ(zpc_expansion_term_count(expansion, &terms), ZPC_OK);
    EXPECT_EQ(terms, 13u);
    double f = 0.0;
    double g = 0.0;
    ASSERT_EQ(zpc_expansion_reconstruct(expansion, 0.5, 0.0, &f), ZPC_OK);
    ASSERT_EQ(zpc_pattern_eval(pattern, 0.5, 0.0, &g), ZPC_OK);
    EXPECT_NEAR(f, g, 0.01);

    zpc_crystal *crystal = nullptr;
    ASSERT_EQ(zpc_crystal_hex(5, 0.2, kOmega, 0.0, &crystal), ZPC_OK);
    size_t ions = 0;
    ASSERT_EQ(zpc_crystal_size(crystal, &ions), ZPC_OK);
    EXPECT_EQ(ions, 91u);

    double disk_max = 0.0;
    double ion_max = 0.0;
    ASSERT_EQ(zpc_error_map_save(pattern, expansion, crystal, 64, 128, (dir / "map.csv").c_str(), &disk_max,
                                 &ion_max),
              ZPC_OK);
    EXPECT_LT(ion_max, 0.05);

    zpc_schedule *schedule = nullptr;
    ASSERT_EQ(zpc_plan(expansion, ZPC_MODE_SERIAL, kU, kOmega, kPsi, 0, 0.0, &schedule), ZPC_OK);
    double pulse = 0.0;
    double wall = 0.0;
    ASSERT_EQ(zpc_schedule_times(schedule, &pulse, &wall), ZPC_OK);
    EXPECT_NEAR(pulse, 25e-6, 1e-12);
    const char *diag = nullptr;
    int warnings = -1;
    ASSERT_EQ(zpc_schedule_validate(schedule, kOmega, &diag, &warnings), ZPC_OK);
    EXPECT_EQ(warnings, 0);
    EXPECT_NE(std::string(diag).find("\"segments\""), std::string::npos);

    zpc_result *result = nullptr;
    ASSERT_EQ(zpc_evolve(crystal, schedule, ZPC_METHOD_EXACT, 1e-12, 0, &result), ZPC_OK);
    double target = 0.0;
    double inf = 0.0;
    ASSERT_EQ(zpc_result_ion(result, 0, nullptr, nullptr, nullptr, &target, &inf), ZPC_OK);
    EXPECT_TRUE(std::isnan(target));
    ASSERT_EQ(zpc_result_set_target(result, crystal, pattern, schedule), ZPC_OK);
    double worst = 0.0;
    ASSERT_EQ(zpc_result_max_infidelity(result, &worst), ZPC_OK);
    EXPECT_LT(worst, 1e-2);
    EXPECT_GT(worst, 0.0);
    ASSERT_EQ(zpc_result_save(result, (dir / "evolution.csv").c_str(), (dir / "evolution.json").c_str()), ZPC_OK);
    ASSERT_EQ(zpc_result_save_histogram(result, (dir / "histogram.csv").c_str()), ZPC_OK);
    EXPECT_EQ(zpc_result_ion(result, 91, nullptr, nullptr, nullptr, nullptr, nullptr), ZPC_ERR_INVALID_ARGUMENT);

    zpc_result *bessel = nullptr;
    ASSERT_EQ(zpc_evolve(crystal, schedule, ZPC_METHOD_BESSEL, 0.0, 24, &bessel), ZPC_OK);
    for (size_t i = 0; i < ions; ++i) {
        double t1 = 0.0;
        double t2 = 0.0;
        ASSERT_EQ(zpc_result_ion(result, i, &t1, nullptr, nullptr, nullptr, nullptr), ZPC_OK);
        ASSERT_EQ(zpc_result_ion(bessel, i, &t2, nullptr, nullptr, nullptr, nullptr), ZPC_OK);
        EXPECT_NEAR(t1, t2, 1e-9);
    }

    zpc_result_free(bessel);
    zpc_result_free(result);
    zpc_schedule_free(schedule);
    zpc_crystal_free(crystal);
    zpc_expansion_free(expansion);
    zpc_pattern_free(pattern);
    fs::remove_all(dir);
}

TEST(CApi, FilesRoundTrip) {
    const fs::path dir = fresh_dir("zpc_capi_files");
    zpc_pattern *pattern = nullptr;
    ASSERT_EQ(zpc_pattern_elliptical(0.5, std::sqrt(2.0) / 10.0, std::sqrt(2.0), &pattern), ZPC_OK);
    zpc_expansion *expansion = nullptr;
    ASSERT_EQ(zpc_decompose(pattern, 26, 10, 1e-9, &expansion), ZPC_OK);
    ASSERT_EQ(zpc_expansion_save_json(expansion, (dir / "e1.json").c_str()), ZPC_OK);
    zpc_expansion *back = nullptr;
    ASSERT_EQ(zpc_expansion_load_json((dir / "e1.json").c_str(), &back), ZPC_OK);
    ASSERT_EQ(zpc_expansion_save_json(back, (dir / "e2.json").c_str()), ZPC_OK);
    EXPECT_EQ(slurp(dir / "e1.json"), slurp(dir / "e2.json"));
    double c1 = 0.0;
    double c2 = 0.0;
    ASSERT_EQ(zpc_expansion_coefficient(expansion, 2, 2, &c1), ZPC_OK);
    ASSERT_EQ(zpc_expansion_coefficient(back, 2, 2, &c2), ZPC_OK);
    EXPECT_EQ(c1, c2);

    zpc_schedule *schedule = nullptr;
    ASSERT_EQ(zpc_plan(back, ZPC_MODE_SERIAL, kU, kOmega, kPsi, 18, 0.0, &schedule), ZPC_OK);
    size_t segments = 0;
    ASSERT_EQ(zpc_schedule_segment_count(schedule, &segments), ZPC_OK);
    EXPECT_EQ(segments, 6u);
    ASSERT_EQ(zpc_schedule_save_json(schedule, (dir / "s1.json").c_str()), ZPC_OK);
    zpc_schedule *sback = nullptr;
    ASSERT_EQ(zpc_schedule_load_json((dir / "s1.json").c_str(), &sback), ZPC_OK);
    ASSERT_EQ(zpc_schedule_save_json(sback, (dir / "s2.json").c_str()), ZPC_OK);
    EXPECT_EQ(slurp(dir / "s1.json"), slurp(dir / "s2.json"));
    double omega = 0.0;
    ASSERT_EQ(zpc_schedule_omega(sback, &omega), ZPC_OK);
    EXPECT_EQ(omega, kOmega);

    zpc_crystal *crystal = nullptr;
    ASSERT_EQ(zpc_crystal_hex(5, 0.2, kOmega, 0.2, &crystal), ZPC_OK);
    ASSERT_EQ(zpc_crystal_save_csv(crystal, (dir / "c.csv").c_str()), ZPC_OK);
    zpc_crystal *cback = nullptr;
    ASSERT_EQ(zpc_crystal_load_csv((dir / "c.csv").c_str(), kOmega, &cback), ZPC_OK);
    double r1 = 0.0;
    double p1 = 0.0;
    double r2 = 0.0;
    double p2 = 0.0;
    ASSERT_EQ(zpc_crystal_position(crystal, 17, &r1, &p1), ZPC_OK);
    ASSERT_EQ(zpc_crystal_position(cback, 17, &r2, &p2), ZPC_OK);
    EXPECT_EQ(r1, r2);
    EXPECT_EQ(p1, p2);

    zpc_crystal_free(cback);
    zpc_crystal_free(crystal);
    zpc_schedule_free(sback);
    zpc_schedule_free(schedule);
    zpc_expansion_free(back);
    zpc_expansion_free(expansion);
    zpc_pattern_free(pattern);
    fs::remove_all(dir);
}

TEST(CApi, PrecompensationFailure) {
    zpc_pattern *pattern = nullptr;
    ASSERT_EQ(zpc_pattern_elliptical(3.0, std::sqrt(2.0) / 10.0, std::sqrt(2.0), &pattern), ZPC_OK);
    zpc_expansion *expansion = nullptr;
    ASSERT_EQ(zpc_decompose(pattern, 26, 10, 0.0, &expansion), ZPC_OK);
    zpc_schedule *schedule = nullptr;
    EXPECT_EQ(zpc_plan(expansion, ZPC_MODE_SERIAL, kU, kOmega, kPsi, 18, 0.0, &schedule), ZPC_ERR_PRECOMPENSATION);
    EXPECT_EQ(schedule, nullptr);
    EXPECT_NE(std::string(zpc_last_error()).find("m="), std::string::npos);
    // The parallel protocol has no precompensation step.
    ASSERT_EQ(zpc_plan(expansion, ZPC_MODE_PARALLEL, kU, kOmega, kPsi, 45, 0.0, &schedule), ZPC_OK);
    int warnings = 0;
    ASSERT_EQ(zpc_schedule_validate(schedule, kOmega, nullptr, &warnings), ZPC_OK);
    EXPECT_EQ(warnings, 1);
    zpc_schedule_free(schedule);
    zpc_expansion_free(expansion);
    zpc_pattern_free(pattern);
}

TEST(CApi, ScenarioAndStudy) {
    const fs::path dir = fresh_dir("zpc_capi_scenario");
    double worst = 0.0;
    int passed = 0;
    ASSERT_EQ(zpc_run_scenario("annulus", ZPC_MODE_SERIAL, 1, 1e-12, dir.c_str(), &worst, &passed), ZPC_OK);
    EXPECT_EQ(passed, 1);
    EXPECT_LT(worst, 1e-2);
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    EXPECT_EQ(zpc_run_scenario("annulus", ZPC_MODE_PARALLEL, 1, 1e-12, dir.c_str(), &worst, &passed),
              ZPC_ERR_INVALID_ARGUMENT);

    const double omegas[] = {kOmega};
    ASSERT_EQ(zpc_rwa_study(omegas, 1, kU, 0.25, 1, 100, 0.0, 1e-12, (dir / "rwa").c_str()), ZPC_OK);
    EXPECT_TRUE(fs::exists(dir / "rwa" / "rwa_timeseries.csv"));
    EXPECT_EQ(zpc_reproduce("fig1", 1e-12, dir.c_str(), &passed), ZPC_ERR_INVALID_ARGUMENT);
    fs::remove_all(dir);
}

}  // namespace
