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

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "zpc/zernike.hpp"

namespace zpc {

/// Samples per radial function in exported schedules (uniform on [0, 1]).
inline constexpr int kScheduleRhoSamples = 512;

enum class RadialTransform {
    kLinear,       // scale * S(rho)
    kInverseJ1,    // J1^{-1}(scale * S(rho))
    kArccosShift,  // arccos(scale * S(rho)) - shift
};

/// delta(rho) = transform(scale * sum_k terms[k] R_{m+2k}^m(rho)).
struct RadialFunction {
    int m = 0;
    RadialTransform transform = RadialTransform::kLinear;
    double scale = 0.0;
    double shift = 0.0;
    std::vector<double> terms;

    /// scale * S(rho), before the transform.
    double argument(double rho) const;
    double operator()(double rho) const;
    bool is_zero() const;
};

/// One azimuthal order of a mirror phase map:
///   delta_e(rho) cos(m phi_lab) + delta_o(rho) sin(m phi_lab).
struct MirrorComponent {
    int m = 0;
    RadialFunction even;
    RadialFunction odd;
};

struct MirrorDeformation {
    std::vector<MirrorComponent> components;

    /// Optical phase (radians) at a lab-frame point.
    double operator()(double rho, double phi_lab) const;
};

/// Beatnote mu = multiplier * omega with relative weight.
struct Beatnote {
    int multiplier = 0;
    double weight = 1.0;
};

struct PulseSegment {
    MirrorDeformation deformation;
    std::vector<Beatnote> beatnotes;
    double duration = 0.0;  // seconds
    double psi = -std::numbers::pi / 2;
    double strength = 0.0;  // U, rad/s

    /// True when the coefficient has no time dependence (m = 0 only).
    bool is_static() const;
};

enum class ScheduleMode { kSerial, kParallel };

/// Reference used to build the target state: theta*_j = 2 U0 F_j T_eff.
struct Calibration {
    double reference_strength = 0.0;  // U0, rad/s
    double effective_time = 0.0;      // T_eff, seconds
    double amplitude = 0.0;           // A
    double peak = 0.0;                // max |F|
};

struct PulseSchedule {
    ScheduleMode mode = ScheduleMode::kSerial;
    std::vector<PulseSegment> segments;
    double omega = 0.0;          // crystal rotation, rad/s
    double dm_reset_time = 0.0;  // seconds, accounting only
    Calibration calibration;

    double pulse_time() const;
    double wall_time() const;

    std::string to_json() const;
    /// Parses and checks every schedule invariant, including agreement between
    /// the stored radial samples and the analytic radial functions.
    static PulseSchedule from_json(const std::string &text);
    void save_json(const std::filesystem::path &path) const;
    static PulseSchedule load_json(const std::filesystem::path &path);

    /// 64-bit FNV-1a of to_json(), as 16 hex digits.
    std::string hash() const;
};

struct SerialOptions {
    double strength = 0.0;  // U0, rad/s
    double omega = 0.0;     // rad/s
    double psi = -std::numbers::pi / 2;
    /// Rotations per segment. 0 picks the smallest r whose duration reaches the
    /// requirement at U0 (static m = 0 segments then take the exact time).
    int segment_rotations = 0;
    double dm_reset_time = 0.0;
};

struct ParallelOptions {
    double strength = 0.0;
    double omega = 0.0;
    double psi = -std::numbers::pi / 2;
    int total_rotations = 1;
    double dm_reset_time = 0.0;
};

/// Effective pi-rotation time of the peak ion at strength U0.
double effective_time(double strength, double peak);

/// One segment per nonzero even order and one per nonzero odd order, each with
/// its Bessel (m > 0) or arccos (m = 0) precompensated mirror map. Segment
/// strengths are chosen so the accumulated rotation equals 2 U0 F T_eff.
PulseSchedule plan_serial(const ZernikeExpansion &expansion, const SerialOptions &options);

/// Single segment with delta = F~ (no precompensation) and the beatnote comb
/// m = 0..m_max. The m = 0 beatnote carries weight 1/2 so every order enters the
/// first-order coefficient as (U/2) A P^m.
PulseSchedule plan_parallel(const ZernikeExpansion &expansion, const ParallelOptions &options);

/// Largest amplitude considered inside the linear regime.
inline constexpr double kLinearRegimeAmplitude = 0.06;

struct SegmentDiagnostics {
    double rotations = 0.0;  // omega T / 2 pi
    bool commensurate = false;
    bool is_static = false;
    /// Headroom of the precompensation argument: J1 peak minus max |arg| for
    /// inverse-J1 maps, 1 - max |arg| for arccos maps, +inf when none.
    double precompensation_margin = 0.0;
};

struct ScheduleDiagnostics {
    std::vector<SegmentDiagnostics> segments;
    bool all_commensurate = true;  // static segments count as commensurate
    double min_precompensation_margin = 0.0;
    double linear_amplitude = 0.0;  // parallel: A; serial: 0
    double linear_margin = 0.0;     // kLinearRegimeAmplitude - linear_amplitude
    double pulse_time = 0.0;
    double reset_overhead = 0.0;
    double wall_time = 0.0;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

ScheduleDiagnostics validate_schedule(const PulseSchedule &schedule, double omega);

}  // namespace zpc
