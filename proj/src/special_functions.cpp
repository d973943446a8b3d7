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

#include "zpc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "zpc/error.hpp"

namespace zpc {

namespace {

constexpr int kMaxOrder = 64;
constexpr double kSeriesLimit = 12.0;

// J_n(x) for n >= 0 by the ascending series
//   sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!).
// Terms are summed until they drop below 1e-16 relative to the largest term
// seen, which bounds the tail for this alternating, eventually-decreasing
// series.
double bessel_series(int n, double x) {
    const long double half = static_cast<long double>(x) / 2.0L;
    const long double half_sq = half * half;
    long double term = 1.0L;
    for (int i = 1; i <= n; ++i) {
        term *= half / static_cast<long double>(i);
    }
    long double sum = term;
    long double largest = std::fabs(term);
    for (int k = 1; k < 400; ++k) {
        term *= -half_sq / (static_cast<long double>(k) * static_cast<long double>(k + n));
        sum += term;
        const long double mag = std::fabs(term);
        if (mag > largest) {
            largest = mag;
        }
        if (mag <= 1e-19L * largest && static_cast<long double>(k) > half) {
            break;
        }
    }
    return static_cast<double>(sum);
}

double j1_derivative(double x) {
    return 0.5 * (bessel_j(0, x) - bessel_j(2, x));
}

double j1_second_derivative(double x) {
    return 0.25 * (bessel_j(3, x) - 3.0 * bessel_j(1, x));
}

J1Peak compute_j1_peak() {
    double x = 1.84;
    for (int it = 0; it < 50; ++it) {
        const double step = j1_derivative(x) / j1_second_derivative(x);
        x -= step;
        if (std::fabs(step) < 1e-15) {
            break;
        }
    }
    return J1Peak{x, bessel_j(1, x)};
}

// R_{m+2k}^m(rho) = P_k^{(0,m)}(2 rho^2 - 1) * rho^m.
template <typename F>
void jacobi_walk(int abs_m, double rho, int count, F &&emit) {
    if (count <= 0) {
        return;
    }
    const double x = 2.0 * rho * rho - 1.0;
    const double rho_m = std::pow(rho, abs_m);
    const double beta = abs_m;
    double prev = 1.0;
    emit(0, rho_m * prev);
    if (count == 1) {
        return;
    }
    // P_1^{(0,b)}(x) = 1 + (b + 2)(x - 1)/2
    double cur = 1.0 + (beta + 2.0) * (x - 1.0) / 2.0;
    emit(1, rho_m * cur);
    for (int k = 2; k < count; ++k) {
        const double kk = k;
        const double s = 2.0 * kk + beta;
        const double a1 = 2.0 * kk * (kk + beta) * (s - 2.0);
        const double a2 = (s - 1.0) * (s * (s - 2.0) * x - beta * beta);
        const double a3 = 2.0 * (kk - 1.0) * (kk + beta - 1.0) * s;
        const double next = (a2 * cur - a3 * prev) / a1;
        prev = cur;
        cur = next;
        emit(k, rho_m * cur);
    }
}

}  // namespace

double bessel_j(int order, double x) {
    if (!std::isfinite(x)) {
        fail(ErrorCode::kInvalidArgument, "bessel_j: argument is not finite");
    }
    if (order < -kMaxOrder || order > kMaxOrder) {
        fail(ErrorCode::kInvalidArgument, "bessel_j: |order| exceeds 64");
    }
    int n = order;
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        if (n % 2 != 0) {
            sign = -sign;
        }
    }
    if (x < 0.0) {
        x = -x;
        if (n % 2 != 0) {
            sign = -sign;
        }
    }
    if (x <= kSeriesLimit) {
        return sign * bessel_series(n, x);
    }
    return sign * std::cyl_bessel_j(static_cast<double>(n), x);
}

const J1Peak &j1_peak() {
    static const J1Peak peak = compute_j1_peak();
    return peak;
}

double inverse_j1(double y) {
    const J1Peak &peak = j1_peak();
    if (!std::isfinite(y)) {
        fail(ErrorCode::kInvalidArgument, "inverse_j1: argument is not finite");
    }
    const double target = std::fabs(y);
    if (target > peak.value + 1e-4) {
        fail(ErrorCode::kPrecompensationRange,
             "precompensation out of range: |y| = " + std::to_string(target) + " exceeds max J1 = " +
                 std::to_string(peak.value));
    }
    if (target >= peak.value) {
        return std::copysign(peak.x, y);
    }
    double lo = 0.0;
    double hi = peak.x;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (bessel_j(1, mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    // Newton polish. J_1' vanishes at the peak, so stay on the bracket.
    for (int it = 0; it < 20; ++it) {
        const double d = j1_derivative(x);
        if (d <= 0.0) {
            break;
        }
        const double step = (bessel_j(1, x) - target) / d;
        double next = x - step;
        if (next < 0.0) {
            next = 0.0;
        }
        if (next > peak.x) {
            next = peak.x;
        }
        x = next;
        if (std::fabs(step) < 1e-16) {
            break;
        }
    }
    return std::copysign(x, y);
}

ZernikeIndex::ZernikeIndex(int n, int m) : n_(n), m_(m) {
    if (!is_valid(n, m)) {
        fail(ErrorCode::kInvalidArgument,
             "invalid Zernike index (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
    }
}

bool ZernikeIndex::is_valid(int n, int m) noexcept {
    const int am = m < 0 ? -m : m;
    return n >= 0 && n >= am && (n - am) % 2 == 0;
}

std::string ZernikeIndex::str() const {
    return "(" + std::to_string(n_) + "," + std::to_string(m_) + ")";
}

double zernike_radial(const ZernikeIndex &idx, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        fail(ErrorCode::kInvalidArgument, "zernike_radial: rho outside [0, 1]");
    }
    const int k = (idx.n() - idx.abs_m()) / 2;
    double result = 0.0;
    jacobi_walk(idx.abs_m(), rho, k + 1, [&](int i, double v) {
        if (i == k) {
            result = v;
        }
    });
    return result;
}

void zernike_radial_all(int abs_m, double rho, std::span<double> out) {
    jacobi_walk(abs_m, rho, static_cast<int>(out.size()), [&](int i, double v) {
        out[static_cast<size_t>(i)] = v;
    });
}

double zernike_eval(const ZernikeIndex &idx, double rho, double phi) {
    const double r = zernike_radial(idx, rho);
    if (idx.m() >= 0) {
        return r * std::cos(idx.m() * phi);
    }
    return r * std::sin(idx.abs_m() * phi);
}

}  // namespace zpc
