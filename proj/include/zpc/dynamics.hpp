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
#include <span>
#include <string>
#include <vector>

#include "zpc/crystal.hpp"
#include "zpc/patterns.hpp"
#include "zpc/planner.hpp"

namespace zpc {

enum class EvolutionMethod { kExactQuadrature, kExactBessel, kRwa };

const char *method_name(EvolutionMethod method);

/// Static-coefficient model used by evolve_rwa.
enum class RwaModel {
    /// Single-component segments keep the exact static Bessel term; multi-
    /// component segments use the first-order (linear in delta) coefficient.
    kFirstOrder,
    /// Exact period average of f(t), all orders included.
    kSpectral,
};

struct EvolutionResult {
    EvolutionMethod method = EvolutionMethod::kExactQuadrature;
    double tolerance = 0.0;
    int bessel_terms = 0;
    std::string schedule_hash;

    std::vector<PolarPoint> positions;
    std::vector<double> theta;  // Bloch rotation angle, radians
    std::vector<double> sigma_x;
    std::vector<double> sigma_y;
    std::vector<double> theta_target;  // empty until set_target
    std::vector<double> infidelity;

    size_t size() const noexcept {
        return theta.size();
    }
    void set_target(std::span<const double> target);
    double max_infidelity() const;

    /// ion_index,rho,phi,theta,sigma_x,sigma_y,theta_target,infidelity
    void save_csv(const std::filesystem::path &path) const;
    /// method, tolerances, schedule hash.
    void save_metadata(const std::filesystem::path &path) const;
    static EvolutionResult load_csv(const std::filesystem::path &path);
};

/// f_j(t) = U sum_b w_b cos(delta(rho_j, phi_j - omega t) - mu_b t + psi), with t
/// measured from the start of the segment.
double instantaneous_coefficient(const PulseSegment &segment, const PolarPoint &ion, double omega, double t);

/// Precomputes the mirror map at one ion so f(t) costs only trigonometry.
class IonIntegrand {
   public:
    IonIntegrand(const PulseSegment &segment, const PolarPoint &ion, double omega);
    double operator()(double t) const {
        return at_angle(omega_ * t);
    }
    /// f as a function of the crystal rotation angle omega t. Callers reduce the
    /// angle mod 2 pi to keep the trigonometric arguments small.
    double at_angle(double angle) const;
    /// Highest angular frequency in units of omega.
    int max_harmonic() const noexcept {
        return max_harmonic_;
    }

   private:
    struct Term {
        int m;
        double even;
        double odd;
    };
    std::vector<Term> terms_;
    std::vector<Beatnote> beatnotes_;
    double phi_;
    double omega_;
    double psi_;
    double strength_;
    int max_harmonic_ = 0;
};

/// integral of f_j over [t0, t1] of one segment by adaptive Gauss-Kronrod,
/// with panels aligned to the fastest beatnote period.
double segment_integral_exact(const PulseSegment &segment, const PolarPoint &ion, double omega, double t0, double t1,
                              double tol);

/// Static coefficient of f_j under the chosen RWA model.
double segment_rwa_coefficient(const PulseSegment &segment, const PolarPoint &ion, double omega,
                               RwaModel model = RwaModel::kFirstOrder);

EvolutionResult evolve_exact(const IonCrystal &crystal, const PulseSchedule &schedule, double tol = 1e-12);
/// Jacobi-Anger series oracle. Requires each segment to carry one even mirror
/// component and one beatnote with multiplier equal to its order.
EvolutionResult evolve_exact_bessel(const IonCrystal &crystal, const PulseSchedule &schedule, int n_terms = 24);
EvolutionResult evolve_rwa(const IonCrystal &crystal, const PulseSchedule &schedule,
                           RwaModel model = RwaModel::kFirstOrder);

/// theta*_j = 2 U F(rho_j, phi_j) T.
std::vector<double> target_phases(const IonCrystal &crystal, const TargetPattern &pattern, double strength,
                                  double total_time);
/// Target phases from the schedule's calibration (U0, T_eff).
std::vector<double> target_phases(const IonCrystal &crystal, const TargetPattern &pattern,
                                  const PulseSchedule &schedule);

/// 1 - |<+|e^{i theta* Z/2} e^{-i theta Z/2}|+>|^2 = sin^2((theta - theta*)/2).
double infidelity(double theta, double theta_target);

}  // namespace zpc
