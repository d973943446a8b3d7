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


#include "zpc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "zpc/error.hpp"
#include "zpc/special_functions.hpp"

namespace zpc {

using nlohmann::json;

namespace {

// Grid used to certify precompensation before a schedule is emitted.
constexpr int kRangeCheckPoints = 2049;

// Truncated expansions overshoot a saturated target by ~1e-5; arguments this
// close to +-1 are clamped, the same band inverse_j1 allows above the J1 peak.
constexpr double kArccosSlack = 1e-4;

double radial_sum(int m, const std::vector<double> &terms, double rho) {
    if (terms.empty()) {
        return 0.0;
    }
    std::vector<double> r(terms.size());
    zernike_radial_all(m, rho, r);
    double s = 0.0;
    for (size_t k = 0; k < terms.size(); ++k) {
        s += terms[k] * r[k];
    }
    return s;
}

const char *transform_name(RadialTransform t) {
    switch (t) {
        case RadialTransform::kLinear:
            return "linear";
        case RadialTransform::kInverseJ1:
            return "inverse_j1";
        case RadialTransform::kArccosShift:
            return "arccos_shift";
    }
    return "linear";
}

RadialTransform parse_transform(const std::string &name) {
    if (name == "linear") {
        return RadialTransform::kLinear;
    }
    if (name == "inverse_j1") {
        return RadialTransform::kInverseJ1;
    }
    if (name == "arccos_shift") {
        return RadialTransform::kArccosShift;
    }
    fail(ErrorCode::kInvalidArgument, "unknown radial transform '" + name + "'");
}

std::string fmt(const char *format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), format, a, b, c);
    return buf;
}

}  // namespace

double RadialFunction::argument(double rho) const {
    return scale * radial_sum(m, terms, rho);
}

double RadialFunction::operator()(double rho) const {
    const double x = argument(rho);
    switch (transform) {
        case RadialTransform::kLinear:
            return x;
        case RadialTransform::kInverseJ1:
            return inverse_j1(x);
        case RadialTransform::kArccosShift: {
            if (std::fabs(x) > 1.0 + kArccosSlack) {
                fail(ErrorCode::kPrecompensationRange,
                     fmt("arccos domain: m=0 argument %.6g at rho=%.6g lies outside [-1, 1]", x, rho));
            }
            return std::acos(std::clamp(x, -1.0, 1.0)) - shift;
        }
    }
    return x;
}

bool RadialFunction::is_zero() const {
    if (transform == RadialTransform::kArccosShift) {
        return false;
    }
    return scale == 0.0 ||
           std::all_of(terms.begin(), terms.end(), [](double t) { return std::fabs(t) < kCoefficientFloor; });
}

double MirrorDeformation::operator()(double rho, double phi_lab) const {
    double s = 0.0;
    for (const auto &c : components) {
        if (c.m == 0) {
            s += c.even(rho);
            continue;
        }
        s += c.even(rho) * std::cos(c.m * phi_lab) + c.odd(rho) * std::sin(c.m * phi_lab);
    }
    return s;
}

bool PulseSegment::is_static() const {
    for (const auto &c : deformation.components) {
        if (c.m != 0) {
            return false;
        }
    }
    for (const auto &b : beatnotes) {
        if (b.multiplier != 0) {
            return false;
        }
    }
    return true;
}

double PulseSchedule::pulse_time() const {
    double t = 0.0;
    for (const auto &s : segments) {
        t += s.duration;
    }
    return t;
}

double PulseSchedule::wall_time() const {
    const size_t resets = segments.empty() ? 0 : segments.size() - 1;
    return pulse_time() + dm_reset_time * static_cast<double>(resets);
}

double effective_time(double strength, double peak) {
    require(strength > 0.0 && std::isfinite(strength), "strength U must be positive");
    require(peak > 0.0 && std::isfinite(peak), "pattern peak must be positive");
    return std::numbers::pi / (2.0 * strength * peak);
}

namespace {

RadialFunction make_radial(int m, RadialTransform t, double scale, double shift, const std::vector<double> &terms) {
    RadialFunction f;
    f.m = m;
    f.transform = t;
    f.scale = scale;
    f.shift = shift;
    f.terms = terms;
    return f;
}

RadialFunction zero_radial(int m) {
    return make_radial(m, RadialTransform::kLinear, 0.0, 0.0, {});
}

void check_range(const RadialFunction &f, double limit, const char *what) {
    for (int i = 0; i < kRangeCheckPoints; ++i) {
        const double rho = static_cast<double>(i) / (kRangeCheckPoints - 1);
        const double x = f.argument(rho);
        if (std::fabs(x) > limit) {
            fail(ErrorCode::kPrecompensationRange,
                 "precompensation out of range for m=" + std::to_string(f.m) + " (" + what + ")" +
                     fmt(" at rho=%.6g: |argument| = %.6g exceeds %.6g", rho, std::fabs(x), limit));
        }
    }
}

void validate_common(double strength, double omega, double psi) {
    require(std::isfinite(strength) && strength > 0.0, "strength U must be positive");
    require(std::isfinite(omega) && omega > 0.0, "rotation frequency omega must be positive");
    require(std::isfinite(psi), "phase psi must be finite");
}

}  // namespace

PulseSchedule plan_serial(const ZernikeExpansion &expansion, const SerialOptions &options) {
    validate_common(options.strength, options.omega, options.psi);
    require(options.segment_rotations >= 0, "segment_rotations must be non-negative");
    require(options.dm_reset_time >= 0.0, "dm_reset_time must be non-negative");
    const RadialProfileSet profiles(expansion);
    const double a = expansion.amplitude();
    const double u0 = options.strength;
    const double t_eff = effective_time(u0, expansion.peak());
    const double period = 2.0 * std::numbers::pi / options.omega;
    // J1 peak tolerance matches inverse_j1's clamp band.
    const double j1_limit = j1_peak().value + 1e-4;

    PulseSchedule schedule;
    schedule.mode = ScheduleMode::kSerial;
    schedule.omega = options.omega;
    schedule.dm_reset_time = options.dm_reset_time;
    schedule.calibration = {u0, t_eff, a, expansion.peak()};

    // requirement = U_seg * T_seg for the segment.
    auto add_segment = [&](MirrorComponent component, double requirement) {
        PulseSegment seg;
        seg.psi = options.psi;
        seg.beatnotes = {Beatnote{component.m, 1.0}};
        const bool is_static = component.m == 0;
        seg.deformation.components.push_back(std::move(component));
        if (options.segment_rotations > 0) {
            seg.duration = options.segment_rotations * period;
        } else if (is_static) {
            seg.duration = requirement / u0;
        } else {
            const double r = std::ceil(requirement / u0 / period - 1e-9);
            seg.duration = std::max(1.0, r) * period;
        }
        seg.strength = requirement / seg.duration;
        schedule.segments.push_back(std::move(seg));
    };

    if (profiles.has_even(0)) {
        MirrorComponent c;
        c.m = 0;
        c.even = make_radial(0, RadialTransform::kArccosShift, a, options.psi, profiles.even_terms(0));
        c.odd = zero_radial(0);
        check_range(c.even, 1.0 + kArccosSlack, "arccos domain");
        add_segment(std::move(c), u0 * t_eff);
    }
    for (int m = 1; m <= profiles.m_max(); ++m) {
        if (profiles.has_even(m)) {
            MirrorComponent c;
            c.m = m;
            c.even = make_radial(m, RadialTransform::kInverseJ1, a / 2.0, 0.0, profiles.even_terms(m));
            c.odd = zero_radial(m);
            check_range(c.even, j1_limit, "even");
            add_segment(std::move(c), 2.0 * u0 * t_eff);
        }
        if (profiles.has_odd(m)) {
            MirrorComponent c;
            c.m = m;
            c.even = zero_radial(m);
            c.odd = make_radial(m, RadialTransform::kInverseJ1, a / 2.0, 0.0, profiles.odd_terms(m));
            check_range(c.odd, j1_limit, "odd");
            add_segment(std::move(c), 2.0 * u0 * t_eff);
        }
    }
    require(!schedule.segments.empty(), "expansion has no nonzero coefficients to schedule");
    return schedule;
}

PulseSchedule plan_parallel(const ZernikeExpansion &expansion, const ParallelOptions &options) {
    validate_common(options.strength, options.omega, options.psi);
    require(options.total_rotations >= 1, "total_rotations must be positive");
    require(options.dm_reset_time >= 0.0, "dm_reset_time must be non-negative");
    const RadialProfileSet profiles(expansion);
    const double a = expansion.amplitude();
    const double u0 = options.strength;
    const double t_eff = effective_time(u0, expansion.peak());

    PulseSegment seg;
    seg.psi = options.psi;
    seg.duration = options.total_rotations * 2.0 * std::numbers::pi / options.omega;
    // First-order coefficient is (U/2) F~, so U T = 2 U0 T_eff.
    seg.strength = 2.0 * u0 * t_eff / seg.duration;
    for (int m = 0; m <= profiles.m_max(); ++m) {
        seg.beatnotes.push_back(Beatnote{m, m == 0 ? 0.5 : 1.0});
        if (!profiles.has_even(m) && !profiles.has_odd(m)) {
            continue;
        }
        MirrorComponent c;
        c.m = m;
        c.even = profiles.has_even(m) ? make_radial(m, RadialTransform::kLinear, a, 0.0, profiles.even_terms(m))
                                      : zero_radial(m);
        c.odd = profiles.has_odd(m) ? make_radial(m, RadialTransform::kLinear, a, 0.0, profiles.odd_terms(m))
                                    : zero_radial(m);
        seg.deformation.components.push_back(std::move(c));
    }
    require(!seg.deformation.components.empty(), "expansion has no nonzero coefficients to schedule");

    PulseSchedule schedule;
    schedule.mode = ScheduleMode::kParallel;
    schedule.omega = options.omega;
    schedule.dm_reset_time = options.dm_reset_time;
    schedule.calibration = {u0, t_eff, a, expansion.peak()};
    schedule.segments.push_back(std::move(seg));
    return schedule;
}

namespace {

json radial_to_json(const RadialFunction &f) {
    json samples = json::array();
    for (int i = 0; i < kScheduleRhoSamples; ++i) {
        samples.push_back(f(static_cast<double>(i) / (kScheduleRhoSamples - 1)));
    }
    return json{{"transform", transform_name(f.transform)},
                {"scale", f.scale},
                {"shift", f.shift},
                {"terms", f.terms},
                {"samples", samples}};
}

RadialFunction radial_from_json(const json &j, int m) {
    RadialFunction f;
    f.m = m;
    f.transform = parse_transform(j.at("transform").get<std::string>());
    f.scale = j.at("scale").get<double>();
    f.shift = j.value("shift", 0.0);
    f.terms = j.at("terms").get<std::vector<double>>();
    require(std::isfinite(f.scale) && std::isfinite(f.shift), "radial function parameters must be finite");
    for (double t : f.terms) {
        require(std::isfinite(t), "radial function terms must be finite");
    }
    if (j.contains("samples")) {
        const auto samples = j.at("samples").get<std::vector<double>>();
        require(samples.size() == static_cast<size_t>(kScheduleRhoSamples),
                "radial samples must have " + std::to_string(kScheduleRhoSamples) + " entries");
        for (int i = 0; i < kScheduleRhoSamples; ++i) {
            const double expect = f(static_cast<double>(i) / (kScheduleRhoSamples - 1));
            const double got = samples[static_cast<size_t>(i)];
            require(std::fabs(expect - got) <= 1e-9 * std::max(1.0, std::fabs(expect)),
                    "radial samples disagree with the analytic mirror map for m=" + std::to_string(m));
        }
    }
    return f;
}

}  // namespace

std::string PulseSchedule::to_json() const {
    json j;
    j["mode"] = mode == ScheduleMode::kSerial ? "serial" : "parallel";
    j["omega_rad_s"] = omega;
    j["dm_reset_time_s"] = dm_reset_time;
    j["rho_samples"] = kScheduleRhoSamples;
    j["calibration"] = {{"reference_U_rad_s", calibration.reference_strength},
                        {"effective_time_s", calibration.effective_time},
                        {"A", calibration.amplitude},
                        {"peak", calibration.peak}};
    json segs = json::array();
    for (const auto &s : segments) {
        json seg;
        seg["duration_s"] = s.duration;
        seg["psi"] = s.psi;
        seg["U_rad_s"] = s.strength;
        json beats = json::array();
        for (const auto &b : s.beatnotes) {
            beats.push_back({{"multiplier", b.multiplier}, {"weight", b.weight}});
        }
        seg["beatnotes"] = beats;
        json comps = json::array();
        for (const auto &c : s.deformation.components) {
            comps.push_back({{"m", c.m}, {"even", radial_to_json(c.even)}, {"odd", radial_to_json(c.odd)}});
        }
        seg["components"] = comps;
        segs.push_back(seg);
    }
    j["segments"] = segs;
    return j.dump(2);
}

PulseSchedule PulseSchedule::from_json(const std::string &text) {
    PulseSchedule s;
    try {
        const json j = json::parse(text);
        const std::string mode = j.at("mode").get<std::string>();
        require(mode == "serial" || mode == "parallel", "schedule mode must be serial or parallel");
        s.mode = mode == "serial" ? ScheduleMode::kSerial : ScheduleMode::kParallel;
        s.omega = j.at("omega_rad_s").get<double>();
        s.dm_reset_time = j.value("dm_reset_time_s", 0.0);
        require(std::isfinite(s.omega) && s.omega > 0.0, "schedule omega must be positive");
        require(std::isfinite(s.dm_reset_time) && s.dm_reset_time >= 0.0, "dm_reset_time must be non-negative");
        const json &cal = j.at("calibration");
        s.calibration.reference_strength = cal.at("reference_U_rad_s").get<double>();
        s.calibration.effective_time = cal.at("effective_time_s").get<double>();
        s.calibration.amplitude = cal.at("A").get<double>();
        s.calibration.peak = cal.at("peak").get<double>();
        require(s.calibration.reference_strength > 0.0 && s.calibration.effective_time > 0.0 &&
                    s.calibration.amplitude > 0.0 && s.calibration.peak > 0.0,
                "schedule calibration values must be positive");
        for (const auto &js : j.at("segments")) {
            PulseSegment seg;
            seg.duration = js.at("duration_s").get<double>();
            seg.psi = js.at("psi").get<double>();
            seg.strength = js.at("U_rad_s").get<double>();
            require(std::isfinite(seg.duration) && seg.duration > 0.0, "segment duration must be positive");
            require(std::isfinite(seg.psi), "segment psi must be finite");
            require(std::isfinite(seg.strength) && seg.strength >= 0.0, "segment U must be non-negative");
            for (const auto &jb : js.at("beatnotes")) {
                Beatnote b{jb.at("multiplier").get<int>(), jb.value("weight", 1.0)};
                require(b.multiplier >= 0 && std::isfinite(b.weight), "invalid beatnote");
                seg.beatnotes.push_back(b);
            }
            std::set<int> orders;
            for (const auto &jc : js.at("components")) {
                MirrorComponent c;
                c.m = jc.at("m").get<int>();
                require(c.m >= 0 && c.m <= 128, "component order out of range");
                require(orders.insert(c.m).second, "duplicate component order in segment");
                c.even = radial_from_json(jc.at("even"), c.m);
                c.odd = radial_from_json(jc.at("odd"), c.m);
                seg.deformation.components.push_back(std::move(c));
            }
            require(!seg.beatnotes.empty(), "segment has no beatnotes");
            require(!seg.deformation.components.empty(), "segment has no mirror components");
            if (s.mode == ScheduleMode::kSerial) {
                require(seg.beatnotes.size() == 1 && seg.deformation.components.size() == 1,
                        "serial segments need exactly one beatnote and one component");
                require(seg.beatnotes[0].multiplier == seg.deformation.components[0].m,
                        "serial beatnote must match the component order");
            } else {
                std::set<int> comb;
                for (const auto &b : seg.beatnotes) {
                    require(comb.insert(b.multiplier).second, "duplicate beatnote in comb");
                }
                require(*comb.rbegin() + 1 == static_cast<int>(comb.size()),
                        "parallel beatnotes must form the comb 0..m_max");
                require(*orders.rbegin() <= *comb.rbegin(), "component order missing from the beatnote comb");
            }
            s.segments.push_back(std::move(seg));
        }
        require(!s.segments.empty(), "schedule has no segments");
        require(s.mode == ScheduleMode::kSerial || s.segments.size() == 1,
                "parallel schedules hold exactly one segment");
    } catch (const json::exception &ex) {
        fail(ErrorCode::kInvalidArgument, std::string("malformed schedule JSON: ") + ex.what());
    }
    return s;
}

void PulseSchedule::save_json(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write " + path.string());
    }
    out << to_json() << "\n";
}

PulseSchedule PulseSchedule::load_json(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::kIo, "cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string PulseSchedule::hash() const {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : to_json()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ScheduleDiagnostics validate_schedule(const PulseSchedule &schedule, double omega) {
    require(std::isfinite(omega) && omega > 0.0, "validate_schedule: omega must be positive");
    ScheduleDiagnostics d;
    d.min_precompensation_margin = std::numeric_limits<double>::infinity();
    const double j1_max = j1_peak().value;
    for (size_t i = 0; i < schedule.segments.size(); ++i) {
        const auto &seg = schedule.segments[i];
        SegmentDiagnostics sd;
        sd.rotations = omega * seg.duration / (2.0 * std::numbers::pi);
        sd.is_static = seg.is_static();
        const double r = std::round(sd.rotations);
        sd.commensurate = r >= 1.0 && std::fabs(sd.rotations - r) <= 1e-9 * std::max(1.0, r);
        sd.precompensation_margin = std::numeric_limits<double>::infinity();
        for (const auto &c : seg.deformation.components) {
            for (const RadialFunction *f : {&c.even, &c.odd}) {
                if (f->transform == RadialTransform::kLinear) {
                    continue;
                }
                const double limit = f->transform == RadialTransform::kInverseJ1 ? j1_max : 1.0;
                double worst = 0.0;
                for (int k = 0; k < kRangeCheckPoints; ++k) {
                    worst = std::max(worst, std::fabs(f->argument(static_cast<double>(k) / (kRangeCheckPoints - 1))));
                }
                sd.precompensation_margin = std::min(sd.precompensation_margin, limit - worst);
            }
        }
        if (!sd.commensurate && !sd.is_static) {
            d.all_commensurate = false;
            d.warnings.push_back("segment " + std::to_string(i) + " is not commensurate" +
                                 fmt(" (omega T / 2 pi = %.9g)", sd.rotations));
        }
        if (sd.precompensation_margin < 0.0) {
            d.warnings.push_back("segment " + std::to_string(i) + " exceeds the precompensation range");
        }
        d.min_precompensation_margin = std::min(d.min_precompensation_margin, sd.precompensation_margin);
        d.segments.push_back(sd);
    }
    if (schedule.mode == ScheduleMode::kParallel) {
        d.linear_amplitude = schedule.calibration.amplitude;
        d.linear_margin = kLinearRegimeAmplitude - d.linear_amplitude;
        if (d.linear_margin < 0.0) {
            d.warnings.push_back(fmt("amplitude A = %.6g is above the linear regime (A <= %.3g)", d.linear_amplitude,
                                     kLinearRegimeAmplitude));
        }
    } else {
        d.linear_margin = kLinearRegimeAmplitude;
    }
    d.pulse_time = schedule.pulse_time();
    d.reset_overhead = schedule.wall_time() - d.pulse_time;
    d.wall_time = schedule.wall_time();
    return d;
}

std::string ScheduleDiagnostics::to_json() const {
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    json segs = json::array();
    for (const auto &s : segments) {
        segs.push_back({{"rotations", s.rotations},
                        {"commensurate", s.commensurate},
                        {"static", s.is_static},
                        {"precompensation_margin", finite_or_null(s.precompensation_margin)}});
    }
    j["segments"] = segs;
    j["all_commensurate"] = all_commensurate;
    j["min_precompensation_margin"] = finite_or_null(min_precompensation_margin);
    j["linear_amplitude"] = linear_amplitude;
    j["linear_margin"] = linear_margin;
    j["pulse_time_s"] = pulse_time;
    j["reset_overhead_s"] = reset_overhead;
    j["wall_time_s"] = wall_time;
    j["warnings"] = warnings;
    return j.dump(2);
}

}  // namespace zpc
