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


#include "zpc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "zpc/error.hpp"
#include "zpc/parallel.hpp"
#include "zpc/quadrature.hpp"
#include "zpc/special_functions.hpp"

namespace zpc {

using nlohmann::json;

const char *method_name(EvolutionMethod method) {
    switch (method) {
        case EvolutionMethod::kExactQuadrature:
            return "exact-quadrature";
        case EvolutionMethod::kExactBessel:
            return "exact-bessel";
        case EvolutionMethod::kRwa:
            return "rwa";
    }
    return "exact-quadrature";
}

IonIntegrand::IonIntegrand(const PulseSegment &segment, const PolarPoint &ion, double omega)
    : beatnotes_(segment.beatnotes), phi_(ion.phi), omega_(omega), psi_(segment.psi), strength_(segment.strength) {
    for (const auto &c : segment.deformation.components) {
        Term t{c.m, c.even.is_zero() ? 0.0 : c.even(ion.rho), c.odd.is_zero() || c.m == 0 ? 0.0 : c.odd(ion.rho)};
        if (t.even != 0.0 || t.odd != 0.0) {
            terms_.push_back(t);
            max_harmonic_ = std::max(max_harmonic_, c.m);
        }
    }
    for (const auto &b : beatnotes_) {
        max_harmonic_ = std::max(max_harmonic_, b.multiplier);
    }
    max_harmonic_ = std::max(max_harmonic_, 1);
}

double IonIntegrand::at_angle(double angle) const {
    const double phi_lab = phi_ - angle;
    double delta = 0.0;
    for (const auto &term : terms_) {
        if (term.m == 0) {
            delta += term.even;
        } else {
            const double a = term.m * phi_lab;
            delta += term.even * std::cos(a) + term.odd * std::sin(a);
        }
    }
    double f = 0.0;
    for (const auto &b : beatnotes_) {
        f += b.weight * std::cos(delta - b.multiplier * angle + psi_);
    }
    return strength_ * f;
}

double instantaneous_coefficient(const PulseSegment &segment, const PolarPoint &ion, double omega, double t) {
    return IonIntegrand(segment, ion, omega)(t);
}

namespace {

// Panels are 1/H of a rotation period (H = highest harmonic). Each panel is
// integrated in its own local time with the rotation angle at the panel start
// reduced mod 2 pi, so cos never sees arguments of thousands of radians.
double integrate_segment(const IonIntegrand &f, double omega, double t0, double t1, double tol) {
    if (t1 <= t0) {
        return 0.0;
    }
    const int h = f.max_harmonic();
    const double width = 2.0 * std::numbers::pi / (omega * h);
    const long first = static_cast<long>(std::floor(t0 / width));
    const long last = static_cast<long>(std::ceil(t1 / width - 1e-12));
    const long panels = std::max(1L, last - first);
    const double panel_tol = tol / static_cast<double>(panels);
    double total = 0.0;
    for (long k = first; k < first + panels; ++k) {
        const double start = static_cast<double>(k) * width;
        const double lo = std::max(t0, start) - start;
        const double hi = std::min(t1, start + width) - start;
        if (hi <= lo) {
            continue;
        }
        const double base = 2.0 * std::numbers::pi * static_cast<double>(k % h) / h;
        const AdaptiveResult r =
            integrate_adaptive([&](double s) { return f.at_angle(base + omega * s); }, lo, hi, panel_tol, 1, 24);
        if (!r.converged) {
            fail(ErrorCode::kNumerical, "phase integral did not reach the requested tolerance");
        }
        total += r.value;
    }
    return total;
}

}  // namespace

double segment_integral_exact(const PulseSegment &segment, const PolarPoint &ion, double omega, double t0, double t1,
                              double tol) {
    require(tol >= 1e-13, "integration tolerance must be at least 1e-13");
    require(t0 >= 0.0 && t1 <= segment.duration * (1.0 + 1e-12), "integration window outside the segment");
    return integrate_segment(IonIntegrand(segment, ion, omega), omega, t0, t1, tol);
}

namespace {

struct ComponentAtIon {
    int m;
    double even;
    double odd;
};

std::vector<ComponentAtIon> components_at(const PulseSegment &segment, double rho) {
    std::vector<ComponentAtIon> out;
    for (const auto &c : segment.deformation.components) {
        out.push_back({c.m, c.even.is_zero() ? 0.0 : c.even(rho), c.odd.is_zero() || c.m == 0 ? 0.0 : c.odd(rho)});
    }
    return out;
}

// Static part of w cos(R cos(m phi_lab - chi) - b omega t + psi): the Bessel
// order n with n m = -b survives.
double single_component_static(const ComponentAtIon &c, const Beatnote &b, double phi, double psi) {
    if (c.m == 0) {
        return b.multiplier == 0 ? b.weight * std::cos(c.even + psi) : 0.0;
    }
    if (b.multiplier % c.m != 0) {
        return 0.0;
    }
    const int n = -b.multiplier / c.m;
    if (n < -64 || n > 64) {
        return 0.0;
    }
    const double r = std::hypot(c.even, c.odd);
    const double chi = std::atan2(c.odd, c.even);
    return b.weight * bessel_j(n, r) * std::cos(n * std::numbers::pi / 2 + n * (c.m * phi - chi) + psi);
}

double first_order_static(const std::vector<ComponentAtIon> &comps, const Beatnote &b, double phi, double psi) {
    if (b.multiplier == 0) {
        double d0 = 0.0;
        for (const auto &c : comps) {
            if (c.m == 0) {
                d0 += c.even;
            }
        }
        return b.weight * (std::cos(psi) - d0 * std::sin(psi));
    }
    double s = 0.0;
    for (const auto &c : comps) {
        if (c.m == b.multiplier) {
            const double a = c.m * phi - psi;
            s += 0.5 * b.weight * (c.even * std::sin(a) - c.odd * std::cos(a));
        }
    }
    return s;
}

double spectral_static(const IonIntegrand &f) {
    // Trapezoid rule over one period; returns {mean f, mean |f|}.
    auto average = [&](int n) {
        double s = 0.0;
        double s_abs = 0.0;
        for (int k = 0; k < n; ++k) {
            const double v = f.at_angle(2.0 * std::numbers::pi * k / n);
            s += v;
            s_abs += std::fabs(v);
        }
        return std::pair{s / n, s_abs / n};
    };
    int n = 64 * f.max_harmonic();
    double prev = average(n).first;
    for (int it = 0; it < 12; ++it) {
        n *= 2;
        const auto [next, scale] = average(n);
        // The mean can be far smaller than |f|, whose rounding sets the floor.
        if (std::fabs(next - prev) <= 1e-13 * std::max(1.0, scale)) {
            return next;
        }
        prev = next;
    }
    fail(ErrorCode::kNumerical, "spectral period average did not converge");
}

}  // namespace

double segment_rwa_coefficient(const PulseSegment &segment, const PolarPoint &ion, double omega, RwaModel model) {
    if (model == RwaModel::kSpectral) {
        return spectral_static(IonIntegrand(segment, ion, omega));
    }
    const auto comps = components_at(segment, ion.rho);
    double s = 0.0;
    if (comps.size() == 1) {
        for (const auto &b : segment.beatnotes) {
            s += single_component_static(comps[0], b, ion.phi, segment.psi);
        }
    } else {
        for (const auto &b : segment.beatnotes) {
            s += first_order_static(comps, b, ion.phi, segment.psi);
        }
    }
    return segment.strength * s;
}

namespace {

EvolutionResult make_result(const IonCrystal &crystal, const PulseSchedule &schedule, EvolutionMethod method,
                            std::vector<double> theta) {
    EvolutionResult r;
    r.method = method;
    r.schedule_hash = schedule.hash();
    r.positions = crystal.positions();
    r.theta = std::move(theta);
    r.sigma_x.resize(r.theta.size());
    r.sigma_y.resize(r.theta.size());
    for (size_t i = 0; i < r.theta.size(); ++i) {
        r.sigma_x[i] = std::cos(r.theta[i]);
        r.sigma_y[i] = std::sin(r.theta[i]);
    }
    return r;
}

}  // namespace

EvolutionResult evolve_exact(const IonCrystal &crystal, const PulseSchedule &schedule, double tol) {
    require(tol >= 1e-13, "integration tolerance must be at least 1e-13");
    const double omega = crystal.omega();
    std::vector<double> theta(crystal.size(), 0.0);
    parallel_for(crystal.size(), [&](size_t i) {
        double acc = 0.0;
        for (const auto &seg : schedule.segments) {
            acc += 2.0 * integrate_segment(IonIntegrand(seg, crystal[i], omega), omega, 0.0, seg.duration, tol);
        }
        theta[i] = acc;
    });
    EvolutionResult r = make_result(crystal, schedule, EvolutionMethod::kExactQuadrature, std::move(theta));
    r.tolerance = tol;
    return r;
}

EvolutionResult evolve_exact_bessel(const IonCrystal &crystal, const PulseSchedule &schedule, int n_terms) {
    require(n_terms >= 8 && n_terms <= 64, "Bessel series needs 8 <= n_terms <= 64");
    for (const auto &seg : schedule.segments) {
        const bool ok = seg.deformation.components.size() == 1 && seg.beatnotes.size() == 1 &&
                        seg.deformation.components[0].odd.is_zero() &&
                        seg.beatnotes[0].multiplier == seg.deformation.components[0].m;
        if (!ok) {
            fail(ErrorCode::kInvalidArgument,
                 "oracle inapplicable: Bessel series needs one even component with a matching beatnote per segment");
        }
    }
    const double omega = crystal.omega();
    std::vector<double> theta(crystal.size(), 0.0);
    parallel_for(crystal.size(), [&](size_t i) {
        const PolarPoint &ion = crystal[i];
        double acc = 0.0;
        for (const auto &seg : schedule.segments) {
            const auto &c = seg.deformation.components[0];
            const double z = c.even(ion.rho);
            const double w = seg.beatnotes[0].weight * seg.strength;
            const double t = seg.duration;
            double s = 0.0;
            if (c.m == 0) {
                s = w * std::cos(z + seg.psi) * t;
            } else {
                for (int n = -n_terms; n <= n_terms; ++n) {
                    if (n == -1) {
                        s += w * bessel_j(1, z) * std::sin(c.m * ion.phi - seg.psi) * t;
                        continue;
                    }
                    const double k = (n + 1) * c.m * omega;
                    const double phase = n * std::numbers::pi / 2 + n * c.m * ion.phi + seg.psi;
                    s += w * bessel_j(n, z) * 2.0 * std::sin(k * t / 2) * std::cos(phase - k * t / 2) / k;
                }
            }
            acc += 2.0 * s;
        }
        theta[i] = acc;
    });
    EvolutionResult r = make_result(crystal, schedule, EvolutionMethod::kExactBessel, std::move(theta));
    r.bessel_terms = n_terms;
    return r;
}

EvolutionResult evolve_rwa(const IonCrystal &crystal, const PulseSchedule &schedule, RwaModel model) {
    const double omega = crystal.omega();
    std::vector<double> theta(crystal.size(), 0.0);
    parallel_for(crystal.size(), [&](size_t i) {
        double acc = 0.0;
        for (const auto &seg : schedule.segments) {
            acc += 2.0 * segment_rwa_coefficient(seg, crystal[i], omega, model) * seg.duration;
        }
        theta[i] = acc;
    });
    return make_result(crystal, schedule, EvolutionMethod::kRwa, std::move(theta));
}

std::vector<double> target_phases(const IonCrystal &crystal, const TargetPattern &pattern, double strength,
                                  double total_time) {
    std::vector<double> out;
    out.reserve(crystal.size());
    for (const auto &ion : crystal.positions()) {
        out.push_back(2.0 * strength * pattern(ion.rho, ion.phi) * total_time);
    }
    return out;
}

std::vector<double> target_phases(const IonCrystal &crystal, const TargetPattern &pattern,
                                  const PulseSchedule &schedule) {
    return target_phases(crystal, pattern, schedule.calibration.reference_strength,
                         schedule.calibration.effective_time);
}

double infidelity(double theta, double theta_target) {
    const double s = std::sin(0.5 * (theta - theta_target));
    return s * s;
}

void EvolutionResult::set_target(std::span<const double> target) {
    require(target.size() == theta.size(), "target phase count does not match ion count");
    theta_target.assign(target.begin(), target.end());
    infidelity.resize(theta.size());
    for (size_t i = 0; i < theta.size(); ++i) {
        infidelity[i] = zpc::infidelity(theta[i], theta_target[i]);
    }
}

double EvolutionResult::max_infidelity() const {
    double m = 0.0;
    for (double v : infidelity) {
        m = std::max(m, v);
    }
    return m;
}

void EvolutionResult::save_csv(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write " + path.string());
    }
    out << "ion_index,rho,phi,theta,sigma_x,sigma_y,theta_target,infidelity\n";
    const bool has_target = theta_target.size() == theta.size();
    char buf[512];
    for (size_t i = 0; i < theta.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, positions[i].rho,
                      positions[i].phi, theta[i], sigma_x[i], sigma_y[i], has_target ? theta_target[i] : NAN,
                      has_target ? infidelity[i] : NAN);
        out << buf;
    }
}

void EvolutionResult::save_metadata(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write " + path.string());
    }
    json j;
    j["method"] = method_name(method);
    j["tolerance"] = tolerance;
    j["bessel_terms"] = bessel_terms;
    j["schedule_hash"] = schedule_hash;
    j["ion_count"] = theta.size();
    j["max_infidelity"] = infidelity.empty() ? json(nullptr) : json(max_infidelity());
    out << j.dump(2) << "\n";
}

EvolutionResult EvolutionResult::load_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::kIo, "cannot open " + path.string());
    }
    EvolutionResult r;
    std::string line;
    std::getline(in, line);
    require(line.rfind("ion_index,", 0) == 0, "evolution CSV is missing its header");
    bool has_target = true;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            v.push_back(std::strtod(cell.c_str(), nullptr));
        }
        require(v.size() == 8, "evolution CSV rows need 8 columns");
        r.positions.push_back({v[1], v[2]});
        r.theta.push_back(v[3]);
        r.sigma_x.push_back(v[4]);
        r.sigma_y.push_back(v[5]);
        r.theta_target.push_back(v[6]);
        r.infidelity.push_back(v[7]);
        has_target = has_target && !std::isnan(v[6]);
    }
    if (!has_target) {
        r.theta_target.clear();
        r.infidelity.clear();
    }
    return r;
}

}  // namespace zpc
