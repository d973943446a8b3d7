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

#include <span>
#include <string>

namespace zpc {

/// Integer-order Bessel function of the first kind.
///
/// Uses the ascending power series (accumulated in extended precision) for
/// |x| <= 12, which covers every argument produced by the planner and the
/// dynamics. Larger arguments fall back to the standard library.
/// Throws ErrorCode::kInvalidArgument for non-finite x or |order| > 64.
double bessel_j(int order, double x);

/// Location and value of the first maximum of J_1.
struct J1Peak {
    double x;
    double value;
};

/// Computed once (Newton iteration on J_1' = 0) and cached.
const J1Peak &j1_peak();

/// Principal-branch inverse of J_1: returns x in [-x_peak, x_peak] with
/// J_1(x) = y.
///
/// Inputs a hair above the peak value (within 1e-4, the rounding of the
/// commonly quoted 0.5819) are clamped to the peak; anything beyond raises
/// ErrorCode::kPrecompensationRange.
double inverse_j1(double y);

/// A Zernike index with n >= |m| and n - |m| even.
class ZernikeIndex {
   public:
    ZernikeIndex(int n, int m);

    int n() const noexcept {
        return n_;
    }
    int m() const noexcept {
        return m_;
    }
    int abs_m() const noexcept {
        return m_ < 0 ? -m_ : m_;
    }

    static bool is_valid(int n, int m) noexcept;

    friend bool operator==(const ZernikeIndex &, const ZernikeIndex &) = default;
    friend auto operator<=>(const ZernikeIndex &, const ZernikeIndex &) = default;

    std::string str() const;

   private:
    int n_;
    int m_;
};

/// Unnormalized radial polynomial R_n^{|m|}(rho), with R(1) = 1.
double zernike_radial(const ZernikeIndex &idx, double rho);

/// Fills out[k] = R_{|m| + 2k}^{|m|}(rho) for k = 0 .. out.size() - 1 using
/// the Jacobi three-term recurrence. No range checks on rho.
void zernike_radial_all(int abs_m, double rho, std::span<double> out);

/// Z_n^m(rho, phi): R cos(m phi) for m >= 0, R sin(|m| phi) for m < 0.
double zernike_eval(const ZernikeIndex &idx, double rho, double phi);

}  // namespace zpc
