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
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "zpc/error.hpp"
#include "zpc/planner.hpp"
#include "zpc/special_functions.hpp"

namespace zpc {
namespace {

constexpr double kU = 2.0 * std::numbers::pi * 10e3;
constexpr double kOmega = 2.0 * std::numbers::pi * 180e3;
constexpr double kPeriod = 2.0 * std::numbers::pi / kOmega;

TargetPattern elliptical(double a) {
    return TargetPattern::elliptical_gaussian(a, std::sqrt(2.0) / 10.0, std::sqrt(2.0));
}

TargetPattern displaced(double a) {
    return TargetPattern::displaced_gaussian(a, 0.1 / std::sqrt(2.0), 0.3, 0.1 * std::sqrt(3.0));
}

PulseSchedule serial(const ZernikeExpansion &e, int rotations, double reset = 0.0) {
    SerialOptions o;
    o.strength = kU;
    o.omega = kOmega;
    o.segment_rotations = rotations;
    o.dm_reset_time = reset;
    return plan_serial(e, o);
}

PulseSchedule parallel(const ZernikeExpansion &e, int rotations) {
    ParallelOptions o;
    o.strength = kU;
    o.omega = kOmega;
    o.total_rotations = rotations;
    return plan_parallel(e, o);
}

TEST(Calibration, EffectiveTime) {
    EXPECT_NEAR(effective_time(kU, 1.0), 25e-6, 1e-18);
    EXPECT_NEAR(effective_time(kU, 0.25), 100e-6, 1e-17);
    EXPECT_THROW(effective_time(-1.0, 1.0), Error);
}

TEST(PlanSerial, PrecompensationRoundTrip) {
    for (const auto &pattern : {elliptical(0.5), displaced(3.0)}) {
        const ZernikeExpansion e = decompose(pattern, 40, 9);
        const RadialProfileSet prof(e);
        const PulseSchedule s = serial(e, 3);
        for (const auto &seg : s.segments) {
            const MirrorComponent &c = seg.deformation.components.at(0);
            for (double rho = 0.0; rho <= 1.0; rho += 1.0 / 64) {
                if (c.m == 0) {
                    EXPECT_NEAR(std::cos(c.even(rho) + seg.psi), e.amplitude() * prof.p(0, rho), 1e-10);
                } else if (!c.even.is_zero()) {
                    EXPECT_NEAR(bessel_j(1, c.even(rho)), 0.5 * e.amplitude() * prof.p(c.m, rho), 1e-10);
                } else {
                    EXPECT_NEAR(bessel_j(1, c.odd(rho)), 0.5 * e.amplitude() * prof.q(c.m, rho), 1e-10);
                }
            }
        }
    }
}

TEST(PlanSerial, AnnulusSingleStaticSegment) {
    const ZernikeExpansion e = decompose(TargetPattern::annulus(1.0, 0.45, 0.55, 10.0), 24, 0);
    const PulseSchedule s = serial(e, 0);
    ASSERT_EQ(s.segments.size(), 1u);
    EXPECT_TRUE(s.segments[0].is_static());
    EXPECT_NEAR(s.pulse_time(), 25e-6, 1e-15);
    EXPECT_NEAR(s.segments[0].strength, kU, 1e-9);
}

TEST(PlanSerial, EllipticalSegmentCountsAndTimes) {
    const PulseSchedule t1 = serial(decompose(elliptical(0.5), 26, 10), 18);
    EXPECT_EQ(t1.segments.size(), 6u);
    EXPECT_NEAR(t1.pulse_time(), 600e-6, 1e-12);
    const PulseSchedule t2 = serial(decompose(elliptical(0.5), 32, 12), 18);
    EXPECT_EQ(t2.segments.size(), 7u);
    EXPECT_NEAR(t2.pulse_time(), 700e-6, 1e-12);
    for (const auto &seg : t1.segments) {
        EXPECT_NEAR(seg.duration, 100e-6, 1e-15);
        ASSERT_EQ(seg.beatnotes.size(), 1u);
        EXPECT_EQ(seg.beatnotes[0].multiplier, seg.deformation.components[0].m);
        EXPECT_EQ(seg.deformation.components[0].m % 2, 0);
    }
}

TEST(PlanSerial, DisplacedSegments) {
    const PulseSchedule s = serial(decompose(displaced(3.0), 40, 9), 3);
    // cos 3phi, cos 9phi and sin 6phi vanish for a peak at 30 degrees.
    EXPECT_EQ(s.segments.size(), 16u);
    EXPECT_NEAR(s.segments[1].duration, 3.0 * kPeriod, 1e-15);
    EXPECT_NEAR(s.pulse_time(), 16.0 * 3.0 * kPeriod, 1e-12);
    EXPECT_EQ(serial(decompose(displaced(3.0), 40, 20), 3).segments.size(), 35u);
}

TEST(PlanSerial, AutomaticDurationIsCommensurateAndWeaker) {
    const PulseSchedule s = serial(decompose(elliptical(0.5), 26, 10), 0);
    const ScheduleDiagnostics d = validate_schedule(s, kOmega);
    EXPECT_TRUE(d.all_commensurate);
    for (const auto &seg : s.segments) {
        EXPECT_LE(seg.strength, kU * (1.0 + 1e-12));
    }
}

TEST(PlanSerial, OutOfRangeNamesOrder) {
    try {
        serial(decompose(elliptical(3.0), 26, 10), 18);
        FAIL() << "expected a precompensation error";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kPrecompensationRange);
        EXPECT_NE(std::string(e.what()).find("m="), std::string::npos);
    }
}

TEST(PlanParallel, CombAndDuration) {
    const PulseSchedule s = parallel(decompose(displaced(0.3), 40, 9), 60);
    ASSERT_EQ(s.segments.size(), 1u);
    const PulseSegment &seg = s.segments[0];
    ASSERT_EQ(seg.beatnotes.size(), 10u);
    for (int m = 0; m <= 9; ++m) {
        EXPECT_EQ(seg.beatnotes[static_cast<size_t>(m)].multiplier, m);
        EXPECT_EQ(seg.beatnotes[static_cast<size_t>(m)].weight, m == 0 ? 0.5 : 1.0);
    }
    bool has_odd = false;
    for (const auto &c : seg.deformation.components) {
        has_odd = has_odd || !c.odd.is_zero();
    }
    EXPECT_TRUE(has_odd);
    EXPECT_NEAR(s.pulse_time(), 333.333333333e-6, 1e-12);
    EXPECT_NEAR(parallel(decompose(elliptical(0.4), 26, 10), 45).pulse_time(), 250e-6, 1e-12);
    EXPECT_NEAR(parallel(decompose(elliptical(0.2), 32, 12), 90).pulse_time(), 500e-6, 1e-12);
}

TEST(PlanParallel, MirrorEqualsReconstruction) {
    const ZernikeExpansion e = decompose(displaced(0.3), 40, 9);
    const PulseSchedule s = parallel(e, 60);
    for (double rho : {0.0, 0.37, 0.9}) {
        for (double phi : {0.1, 2.2}) {
            EXPECT_NEAR(s.segments[0].deformation(rho, phi), e.reconstruct(rho, phi), 1e-12);
        }
    }
}

TEST(Schedule, JsonRoundTrip) {
    for (const PulseSchedule &s : {serial(decompose(displaced(3.0), 40, 9), 3, 50e-6),
                                   parallel(decompose(elliptical(0.4), 26, 10), 45)}) {
        const std::string text = s.to_json();
        const PulseSchedule back = PulseSchedule::from_json(text);
        EXPECT_EQ(back.to_json(), text);
        EXPECT_EQ(back.hash(), s.hash());
        EXPECT_EQ(back.segments.size(), s.segments.size());
        EXPECT_EQ(back.pulse_time(), s.pulse_time());
        EXPECT_EQ(back.wall_time(), s.wall_time());
    }
}

TEST(Schedule, ImportRejectsInconsistentFiles) {
    const PulseSchedule s = serial(decompose(elliptical(0.5), 26, 10), 18);
    nlohmann::json j = nlohmann::json::parse(s.to_json());

    nlohmann::json tampered = j;
    auto &samples = tampered["segments"][1]["components"][0]["even"]["samples"];
    samples[10] = samples[10].get<double>() + 1e-6;
    EXPECT_THROW(PulseSchedule::from_json(tampered.dump()), Error);

    nlohmann::json two = j;
    two["segments"][1]["beatnotes"].push_back({{"multiplier", 4}, {"weight", 1.0}});
    EXPECT_THROW(PulseSchedule::from_json(two.dump()), Error);

    nlohmann::json wrong = j;
    wrong["segments"][1]["beatnotes"][0]["multiplier"] = 3;
    EXPECT_THROW(PulseSchedule::from_json(wrong.dump()), Error);

    EXPECT_THROW(PulseSchedule::from_json("not json"), Error);
}

TEST(Validate, CommensurateAndFlagged) {
    PulseSchedule s = serial(decompose(elliptical(0.5), 26, 10), 18);
    ScheduleDiagnostics d = validate_schedule(s, kOmega);
    EXPECT_TRUE(d.all_commensurate);
    EXPECT_NEAR(d.segments[1].rotations, 18.0, 1e-9);
    EXPECT_TRUE(d.warnings.empty());

    s.segments[1].duration = 5.0 / kOmega;
    d = validate_schedule(s, kOmega);
    EXPECT_FALSE(d.all_commensurate);
    EXPECT_FALSE(d.segments[1].commensurate);
    EXPECT_FALSE(d.warnings.empty());
}

TEST(Validate, ResetOverhead) {
    // Every order 0..9 in both parities: 10 even + 9 odd segments.
    ZernikeExpansion e(0.1, 9, 9, 0.1);
    for (int m = 0; m <= 9; ++m) {
        e.set(ZernikeIndex(m, m), 0.2);
        if (m > 0) {
            e.set(ZernikeIndex(m, -m), 0.2);
        }
    }
    const PulseSchedule s = serial(e, 3, 50e-6);
    ASSERT_EQ(s.segments.size(), 19u);
    const ScheduleDiagnostics d = validate_schedule(s, kOmega);
    EXPECT_NEAR(d.reset_overhead, 900e-6, 1e-15);
    EXPECT_NEAR(d.wall_time, s.pulse_time() + 900e-6, 1e-15);
}

TEST(Validate, LinearRegimeWarning) {
    const ScheduleDiagnostics loud = validate_schedule(parallel(decompose(elliptical(0.4), 26, 10), 45), kOmega);
    EXPECT_NEAR(loud.linear_margin, kLinearRegimeAmplitude - 0.4, 1e-15);
    EXPECT_EQ(loud.warnings.size(), 1u);
    const ScheduleDiagnostics quiet = validate_schedule(parallel(decompose(elliptical(0.05), 26, 10), 45), kOmega);
    EXPECT_TRUE(quiet.warnings.empty());
}

}  // namespace
}  // namespace zpc
