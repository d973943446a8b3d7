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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "zpc/crystal.hpp"
#include "zpc/patterns.hpp"
#include "zpc/special_functions.hpp"

namespace zpc {

using DiskFunction = std::function<double(double rho, double phi)>;

/// Coefficients below this magnitude are treated as absent (and dropped on
/// export).
inline constexpr double kCoefficientFloor = 1e-12;

/// Controls disk quadrature. A result is accepted once doubling both node
/// counts changes it by less than rel_tol (relative to max(1, |value|)).
struct DiskQuadratureSpec {
    int radial_nodes = 96;
    int azimuthal_nodes = 512;
    double rel_tol = 1e-9;
    int max_refinements = 3;
};

/// F ~ A * sum alpha_n^m Z_n^m over |m| <= m_max, n <= n_max.
class ZernikeExpansion {
   public:
    ZernikeExpansion(double amplitude, int n_max, int m_max, double peak = 0.0);

    double amplitude() const noexcept {
        return amplitude_;
    }
    /// max |F| of the pattern the expansion was fitted to; used for pi-rotation
    /// calibration. Defaults to the amplitude when unknown.
    double peak() const noexcept {
        return peak_;
    }
    int n_max() const noexcept {
        return n_max_;
    }
    int m_max() const noexcept {
        return m_max_;
    }

    void set(const ZernikeIndex &idx, double alpha);
    double coefficient(int n, int m) const;
    const std::map<ZernikeIndex, double> &coefficients() const noexcept {
        return coefficients_;
    }

    /// F~(rho, phi).
    double reconstruct(double rho, double phi) const;

    std::string to_json() const;
    static ZernikeExpansion from_json(const std::string &text);
    void save_json(const std::filesystem::path &path) const;
    static ZernikeExpansion load_json(const std::filesystem::path &path);

   private:
    double amplitude_;
    int n_max_;
    int m_max_;
    double peak_;
    std::map<ZernikeIndex, double> coefficients_;
};

/// Radial profiles grouped by azimuthal order:
///   P^m = sum_n alpha_n^m R_n^m,  Q^m = sum_n alpha_n^{-m} R_n^m  (Q^0 == 0).
class RadialProfileSet {
   public:
    explicit RadialProfileSet(const ZernikeExpansion &expansion);

    int m_max() const noexcept {
        return m_max_;
    }
    double amplitude() const noexcept {
        return amplitude_;
    }
    double p(int m, double rho) const;
    double q(int m, double rho) const;
    /// Fills P^m(rho), Q^m(rho) for m = 0..m_max.
    void evaluate(double rho, std::span<double> p_out, std::span<double> q_out) const;

    /// Coefficients alpha_{m+2k}^{+-m} indexed by k.
    const std::vector<double> &even_terms(int m) const {
        return even_[static_cast<size_t>(m)];
    }
    const std::vector<double> &odd_terms(int m) const {
        return odd_[static_cast<size_t>(m)];
    }
    bool has_even(int m) const;
    bool has_odd(int m) const;

   private:
    double amplitude_;
    int m_max_;
    std::vector<std::vector<double>> even_;
    std::vector<std::vector<double>> odd_;
};

inline RadialProfileSet radial_profiles(const ZernikeExpansion &expansion) {
    return RadialProfileSet(expansion);
}

/// <f, g> = integral over the disk of f g rho drho dphi.
double disk_inner_product(const DiskFunction &f, const DiskFunction &g, const DiskQuadratureSpec &spec = {});

/// alpha_n^m = (2n + 2) / (eps_m pi) <F/A, Z_n^m> for all valid indices with
/// |m| <= m_max, n <= n_max.
ZernikeExpansion decompose(const TargetPattern &pattern, int n_max, int m_max, const DiskQuadratureSpec &spec = {});
ZernikeExpansion decompose(const DiskFunction &f, double amplitude, double peak, int n_max, int m_max,
                           const DiskQuadratureSpec &spec = {});

struct TruncationErrorMap {
    int n_rho = 0;
    int n_phi = 0;
    std::vector<double> rho;    // n_rho samples on [0, 1]
    std::vector<double> phi;    // n_phi samples on [0, 2 pi)
    std::vector<double> error;  // |F - F~| / max|F|, row-major (rho, phi)
    double disk_max = 0.0;
    std::vector<double> ion_error;
    double ion_max = 0.0;

    void save_csv(const std::filesystem::path &path) const;
};

TruncationErrorMap truncation_error_map(const TargetPattern &pattern, const ZernikeExpansion &expansion,
                                        int n_rho = 256, int n_phi = 512,
                                        std::span<const PolarPoint> ions = {});

}  // namespace zpc
