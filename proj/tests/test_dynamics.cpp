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


#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "zpc/crystal.hpp"
#include "zpc/dynamics.hpp"
#include "zpc/error.hpp"
#include "zpc/planner.hpp"

namespace zpc {
namespace {

constexpr double kU = 2.0 * std::numbers::pi * 10e3;
constexpr double kOmega = 2.0 * std::numbers::pi * 180e3;
constexpr double kPeriod = 2.0 * std::numbers::pi / kOmega;

TargetPattern elliptical(double a) {
    return TargetPattern::elliptical_gaussian(a, std::sqrt(2.0) / 10.0, std::sqrt(2.0));
}

PulseSchedule elliptical_serial(int rotations) {
    SerialOptions o;
    o.strength = kU;
    o.omega = kOmega;
    o.segment_rotations = rotations;
    return plan_serial(decompose(elliptical(0.5), 26, 10), o);
}

// Random kLinear deformation with both parities on orders 0..m_max, driven by
// the full comb.
PulseSchedule random_multi_order(std::mt19937_64 &rng, int m_max, double rotations, double scale) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    PulseSegment seg;
    seg.duration = rotations * kPeriod;
    seg.strength = kU;
    seg.psi = -std::numbers::pi / 2 + 0.3 * coef(rng);
    for (int m = 0; m <= m_max; ++m) {
        seg.beatnotes.push_back(Beatnote{m, m == 0 ? 0.5 : 1.0});
        MirrorComponent c;
        c.m = m;
        auto radial = [&](bool zero) {
            RadialFunction f;
            f.m = m;
            f.transform = RadialTransform::kLinear;
            f.scale = zero ? 0.0 : scale;
            f.terms = {coef(rng), 0.5 * coef(rng), 0.25 * coef(rng)};
            if (zero) {
                f.terms.assign(3, 0.0);
            }
            return f;
        };
        c.even = radial(false);
        c.odd = radial(m == 0);
        seg.deformation.components.push_back(c);
    }
    PulseSchedule s;
    s.mode = ScheduleMode::kParallel;
    s.omega = kOmega;
    s.segments.push_back(seg);
    return s;
}

TEST(Coefficient, InstantaneousMatchesDefinition) {
    const PulseSchedule s = elliptical_serial(18);
    const PulseSegment &seg = s.segments[2];
    const PolarPoint ion{0.6, 0.4};
    const double t = 3.7e-6;
    const int m = seg.beatnotes[0].multiplier;
    const double delta = seg.deformation(ion.rho, ion.phi - kOmega * t);
    const double expect = seg.strength * std::cos(delta - m * kOmega * t + seg.psi);
    EXPECT_NEAR(instantaneous_coefficient(seg, ion, kOmega, t), expect, 1e-9);
    const IonIntegrand f(seg, ion, kOmega);
    EXPECT_NEAR(f(t), expect, 1e-9);
}

TEST(PhaseIntegral, Additive) {
    const PulseSchedule s = elliptical_serial(18);
    const PolarPoint ion{0.45, 1.3};
    for (const auto &seg : s.segments) {
        const double whole = segment_integral_exact(seg, ion, kOmega, 0.0, seg.duration, 1e-13);
        const double cut = 0.37 * seg.duration;
        const double parts = segment_integral_exact(seg, ion, kOmega, 0.0, cut, 1e-13) +
                             segment_integral_exact(seg, ion, kOmega, cut, seg.duration, 1e-13);
        EXPECT_NEAR(whole, parts, 1e-12);
    }
}

TEST(BesselOracle, AgreesWithQuadrature) {
    const IonCrystal crystal = generate_hex_crystal(5, 0.2, kOmega);
    for (int rotations : {18, 0}) {
        PulseSchedule s = elliptical_serial(rotations == 0 ? 18 : rotations);
        if (rotations == 0) {
            // Off-commensurate durations exercise every sideband.
            for (auto &seg : s.segments) {
                seg.duration = 17.3 * kPeriod;
            }
        }
        const EvolutionResult exact = evolve_exact(crystal, s, 1e-12);
        const EvolutionResult series = evolve_exact_bessel(crystal, s, 24);
        for (size_t i = 0; i < crystal.size(); ++i) {
            EXPECT_NEAR(exact.theta[i], series.theta[i], 1e-9) << "ion " << i;
        }
    }
}

TEST(BesselOracle, RefusesMultiComponentSegments) {
    std::mt19937_64 rng(7);
    const PulseSchedule s = random_multi_order(rng, 3, 10, 0.2);
    const IonCrystal crystal = generate_hex_crystal(1, 0.3, kOmega);
    try {
        evolve_exact_bessel(crystal, s, 24);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
}

TEST(CommensurateTime, RwaIsExactForRandomDeformations) {
    std::mt19937_64 rng(20260315);
    const IonCrystal crystal = generate_hex_crystal(3, 0.3, kOmega, 0.1);
    const double tol = 1e-12;
    for (int trial = 0; trial < 6; ++trial) {
        const int m_max = 1 + trial;
        const PulseSchedule s = random_multi_order(rng, m_max, 5 + 7 * trial, 0.6);
        const EvolutionResult exact = evolve_exact(crystal, s, tol);
        const EvolutionResult rwa = evolve_rwa(crystal, s, RwaModel::kSpectral);
        for (size_t i = 0; i < crystal.size(); ++i) {
            // theta = 2 x integral, so the integral tolerance doubles.
            EXPECT_NEAR(exact.theta[i], rwa.theta[i], 10.0 * 2.0 * tol) << "trial " << trial << " ion " << i;
        }
    }
}

TEST(CommensurateTime, SerialRwaIsExact) {
    const IonCrystal crystal = generate_hex_crystal(5, 0.2, kOmega);
    const PulseSchedule s = elliptical_serial(18);
    const EvolutionResult exact = evolve_exact(crystal, s, 1e-12);
    const EvolutionResult rwa = evolve_rwa(crystal, s);
    for (size_t i = 0; i < crystal.size(); ++i) {
        EXPECT_NEAR(exact.theta[i], rwa.theta[i], 1e-10);
    }
}

// Dense 2x2 propagator by scaling and squaring a Taylor series.
using Mat = std::array<std::complex<double>, 4>;

Mat mul(const Mat &a, const Mat &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

Mat expm(Mat a) {
    int squarings = 0;
    double norm = 0.0;
    for (const auto &x : a) {
        norm = std::max(norm, std::abs(x));
    }
    while (norm > 0.05) {
        norm /= 2.0;
        ++squarings;
    }
    for (auto &x : a) {
        x /= std::pow(2.0, squarings);
    }
    Mat result{1.0, 0.0, 0.0, 1.0};
    Mat term{1.0, 0.0, 0.0, 1.0};
    for (int k = 1; k <= 20; ++k) {
        term = mul(term, a);
        for (auto &x : term) {
            x /= static_cast<double>(k);
        }
        for (int i = 0; i < 4; ++i) {
            result[static_cast<size_t>(i)] += term[static_cast<size_t>(i)];
        }
    }
    for (int i = 0; i < squarings; ++i) {
        result = mul(result, result);
    }
    return result;
}

TEST(Infidelity, MatchesMatrixExponentialOracle) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> angle(-7.0, 7.0);
    const std::complex<double> i1(0.0, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double theta = angle(rng);
        const double target = angle(rng);
        // exp(-i theta sigma_z / 2) applied to |+>.
        auto evolve = [&](double th) {
            const Mat u = expm({-i1 * th / 2.0, 0.0, 0.0, i1 * th / 2.0});
            return std::array<std::complex<double>, 2>{u[0] * r + u[1] * r, u[2] * r + u[3] * r};
        };
        const auto a = evolve(theta);
        const auto b = evolve(target);
        const double overlap = std::norm(std::conj(b[0]) * a[0] + std::conj(b[1]) * a[1]);
        EXPECT_NEAR(infidelity(theta, target), 1.0 - overlap, 1e-12);
        const double sx = 2.0 * std::real(std::conj(a[0]) * a[1]);
        EXPECT_NEAR(sx, std::cos(theta), 1e-12);
    }
}

TEST(Evolution, BlochVectorNormalized) {
    const IonCrystal crystal = generate_hex_crystal(5, 0.2, kOmega);
    const EvolutionResult r = evolve_exact(crystal, elliptical_serial(18));
    for (size_t i = 0; i < r.size(); ++i) {
        EXPECT_NEAR(r.sigma_x[i] * r.sigma_x[i] + r.sigma_y[i] * r.sigma_y[i], 1.0, 1e-14);
        EXPECT_EQ(r.sigma_x[i], std::cos(r.theta[i]));
    }
}

TEST(Evolution, RwaErrorScalesInverselyWithRotation) {
    // Single m = 1 segment, sampled at off-commensurate times over a fixed window.
    const ZernikeExpansion e = [] {
        ZernikeExpansion x(0.25, 1, 1, 0.25);
        x.set(ZernikeIndex(1, 1), 1.0);
        return x;
    }();
    const PolarPoint ion{1.0, 0.0};
    auto max_error = [&](double omega) {
        SerialOptions o;
        o.strength = kU;
        o.omega = omega;
        o.segment_rotations = 1;
        PulseSegment seg = plan_serial(e, o).segments.at(0);
        seg.strength = kU;
        seg.duration = 200e-6;
        const double c = segment_rwa_coefficient(seg, ion, omega, RwaModel::kSpectral);
        double worst = 0.0;
        for (int k = 1; k <= 400; ++k) {
            const double t = 200e-6 * k / 400.0;
            const double exact = segment_integral_exact(seg, ion, omega, 0.0, t, 1e-13);
            worst = std::max(worst, std::fabs(exact - c * t));
        }
        return worst;
    };
    const double w = 2.0 * std::numbers::pi * 90e3;
    const double ratio = max_error(w) / max_error(2.0 * w);
    EXPECT_NEAR(ratio, 2.0, 0.5);
}

TEST(Calibration, PeakIonGetsPi) {
    const TargetPattern pattern = TargetPattern::annulus(1.0, 0.45, 0.55, 10.0);
    SerialOptions o;
    o.strength = kU;
    o.omega = kOmega;
    const PulseSchedule s = plan_serial(decompose(pattern, 54, 0), o);
    const IonCrystal crystal({{0.5, 0.0}, {0.5, 1.0}, {0.0, 0.0}}, kOmega);
    const auto target = target_phases(crystal, pattern, s);
    EXPECT_NEAR(target[0], std::numbers::pi, 1e-12);
    EXPECT_NEAR(target[1], std::numbers::pi, 1e-12);
    const EvolutionResult r = evolve_exact(crystal, s);
    EXPECT_NEAR(r.sigma_x[0], -1.0, 1e-4);
    EXPECT_NEAR(target_phases(crystal, pattern, kU, 25e-6)[0], target[0], 1e-12);
}

TEST(Evolution, CsvRoundTrip) {
    const IonCrystal crystal = generate_hex_crystal(3, 0.3, kOmega);
    const PulseSchedule s = elliptical_serial(18);
    EvolutionResult r = evolve_exact(crystal, s);
    r.set_target(target_phases(crystal, elliptical(0.5), s));
    const auto path = std::filesystem::temp_directory_path() / "zpc_evolution_test.csv";
    r.save_csv(path);
    const EvolutionResult back = EvolutionResult::load_csv(path);
    ASSERT_EQ(back.size(), r.size());
    for (size_t i = 0; i < r.size(); ++i) {
        EXPECT_EQ(back.theta[i], r.theta[i]);
        EXPECT_EQ(back.infidelity[i], r.infidelity[i]);
    }
    EXPECT_EQ(back.max_infidelity(), r.max_infidelity());
    std::filesystem::remove(path);
}

}  // namespace
}  // namespace zpc
