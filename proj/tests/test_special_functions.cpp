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
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "zpc/error.hpp"
#include "zpc/special_functions.hpp"

namespace zpc {
namespace {

// Explicit factorial sum, in long double to keep the alternating sum clean.
double radial_by_factorials(int n, int m, double rho) {
    m = std::abs(m);
    long double sum = 0.0L;
    for (int k = 0; k <= (n - m) / 2; ++k) {
        const long double num = std::tgammal(n - k + 1.0L);
        const long double den = std::tgammal(k + 1.0L) * std::tgammal((n + m) / 2 - k + 1.0L) *
                                std::tgammal((n - m) / 2 - k + 1.0L);
        sum += ((k % 2) ? -1.0L : 1.0L) * num / den * std::pow(static_cast<long double>(rho), n - 2 * k);
    }
    return static_cast<double>(sum);
}

TEST(ZernikeIndex, Validity) {
    EXPECT_TRUE(ZernikeIndex::is_valid(0, 0));
    EXPECT_TRUE(ZernikeIndex::is_valid(4, -2));
    EXPECT_FALSE(ZernikeIndex::is_valid(3, 0));
    EXPECT_FALSE(ZernikeIndex::is_valid(2, 4));
    EXPECT_FALSE(ZernikeIndex::is_valid(-2, 0));
    EXPECT_THROW(ZernikeIndex(3, 2), Error);
    EXPECT_EQ(ZernikeIndex(4, -2).abs_m(), 2);
}

TEST(ZernikeRadial, MatchesFactorialSum) {
    for (int n = 0; n <= 24; ++n) {
        for (int m = n % 2; m <= n; m += 2) {
            for (double rho : {0.0, 0.13, 0.5, 0.77, 0.999, 1.0}) {
                const double expect = radial_by_factorials(n, m, rho);
                EXPECT_NEAR(zernike_radial(ZernikeIndex(n, m), rho), expect, 1e-10 * (1.0 + std::fabs(expect)))
                    << "n=" << n << " m=" << m << " rho=" << rho;
            }
        }
    }
}

TEST(ZernikeRadial, UnitValueAtEdge) {
    for (int n = 0; n <= 60; ++n) {
        for (int m = n % 2; m <= n; m += 2) {
            EXPECT_NEAR(zernike_radial(ZernikeIndex(n, m), 1.0), 1.0, 1e-12);
        }
    }
}

TEST(ZernikeRadial, AllOrdersAgreeWithSingle) {
    std::vector<double> buf(20);
    for (int m = 0; m <= 6; ++m) {
        zernike_radial_all(m, 0.63, buf);
        for (size_t k = 0; k < buf.size(); ++k) {
            EXPECT_NEAR(buf[k], zernike_radial(ZernikeIndex(m + 2 * static_cast<int>(k), m), 0.63), 1e-13);
        }
    }
}

TEST(ZernikeEval, AngularFactor) {
    const double r = zernike_radial(ZernikeIndex(5, 3), 0.4);
    EXPECT_NEAR(zernike_eval(ZernikeIndex(5, 3), 0.4, 0.3), r * std::cos(0.9), 1e-14);
    EXPECT_NEAR(zernike_eval(ZernikeIndex(5, -3), 0.4, 0.3), r * std::sin(0.9), 1e-14);
}

TEST(BesselJ, MatchesStandardLibrary) {
    for (int n = 0; n <= 30; ++n) {
        for (double x : {0.0, 1e-6, 0.3, 1.0, 1.84, 2.5, 4.0, 7.5, 11.9, 15.0, 25.0}) {
            EXPECT_NEAR(bessel_j(n, x), std::cyl_bessel_j(static_cast<double>(n), x), 1e-13) << n << " " << x;
        }
    }
}

TEST(BesselJ, NegativeOrderAndArgument) {
    for (int n = 0; n <= 8; ++n) {
        const double sign = (n % 2) ? -1.0 : 1.0;
        EXPECT_NEAR(bessel_j(-n, 1.7), sign * bessel_j(n, 1.7), 1e-15);
        EXPECT_NEAR(bessel_j(n, -1.7), sign * bessel_j(n, 1.7), 1e-15);
    }
}

TEST(BesselJ, ThreeTermRecurrence) {
    for (double x : {0.4, 1.1, 1.84, 3.3}) {
        for (int n = 1; n <= 20; ++n) {
            const double lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
            EXPECT_NEAR(lhs, 2.0 * n / x * bessel_j(n, x), 1e-13);
        }
    }
}

TEST(BesselJ, JacobiAngerSum) {
    // exp(i z sin t) = sum_n J_n(z) exp(i n t)
    for (double z : {0.2, 1.0, 1.84}) {
        for (double t : {0.0, 0.7, 2.9}) {
            std::complex<double> sum = 0.0;
            for (int n = -30; n <= 30; ++n) {
                sum += bessel_j(n, z) * std::exp(std::complex<double>(0.0, n * t));
            }
            const std::complex<double> expect = std::exp(std::complex<double>(0.0, z * std::sin(t)));
            EXPECT_NEAR(std::abs(sum - expect), 0.0, 1e-14);
        }
    }
}

TEST(J1Peak, IsStationaryMaximum) {
    const J1Peak &p = j1_peak();
    EXPECT_NEAR(p.x, 1.8411837813406593, 1e-12);
    EXPECT_NEAR(p.value, 0.5818652242815963, 1e-12);
    EXPECT_NEAR(bessel_j(0, p.x) - bessel_j(2, p.x), 0.0, 1e-13);
}

TEST(InverseJ1, RoundTrip) {
    std::mt19937_64 rng(20260101);
    std::uniform_real_distribution<double> dist(-j1_peak().value, j1_peak().value);
    for (int i = 0; i < 2000; ++i) {
        const double y = dist(rng);
        const double x = inverse_j1(y);
        EXPECT_LE(std::fabs(x), j1_peak().x + 1e-12);
        EXPECT_NEAR(bessel_j(1, x), y, 1e-12);
    }
    EXPECT_EQ(inverse_j1(0.0), 0.0);
}

TEST(InverseJ1, OutOfRange) {
    EXPECT_NEAR(inverse_j1(0.5819), j1_peak().x, 1e-12);  // inside the clamp band
    try {
        inverse_j1(0.6);
        FAIL() << "expected a range error";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kPrecompensationRange);
    }
}

}  // namespace
}  // namespace zpc
