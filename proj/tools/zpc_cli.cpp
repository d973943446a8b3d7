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


// zpc command-line driver. Talks to the library only through zpc.h.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zpc/zpc.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPrecompensation = 4;

// Thrown for every failure; carries the exit code and a kind label.
struct CliError {
    int exit_code;
    std::string kind;
    std::string message;
};

[[noreturn]] void config_error(const std::string &message) {
    throw CliError{kExitConfig, "config", message};
}

void check(zpc_status status) {
    if (status == ZPC_OK) {
        return;
    }
    const std::string msg = zpc_last_error();
    switch (status) {
        case ZPC_ERR_INVALID_ARGUMENT:
            throw CliError{kExitConfig, "invalid_argument", msg};
        case ZPC_ERR_IO:
            throw CliError{kExitConfig, "io", msg};
        case ZPC_ERR_PRECOMPENSATION:
            throw CliError{kExitPrecompensation, "precompensation_range", msg};
        case ZPC_ERR_NUMERICAL:
            throw CliError{kExitNumerical, "numerical", msg};
        default:
            throw CliError{kExitNumerical, "internal", msg};
    }
}

template <class T, void (*Free)(T *)>
struct Deleter {
    void operator()(T *p) const {
        Free(p);
    }
};
using Pattern = std::unique_ptr<zpc_pattern, Deleter<zpc_pattern, zpc_pattern_free>>;
using Expansion = std::unique_ptr<zpc_expansion, Deleter<zpc_expansion, zpc_expansion_free>>;
using Crystal = std::unique_ptr<zpc_crystal, Deleter<zpc_crystal, zpc_crystal_free>>;
using Schedule = std::unique_ptr<zpc_schedule, Deleter<zpc_schedule, zpc_schedule_free>>;
using Result = std::unique_ptr<zpc_result, Deleter<zpc_result, zpc_result_free>>;

// ---------------------------------------------------------------------------
// Config

struct Config {
    json root;
    fs::path base;  // directory of the config file, for relative paths

    const json &section(const char *name) const {
        static const json empty = json::object();
        if (!root.contains(name)) {
            return empty;
        }
        return root.at(name);
    }

    fs::path resolve(const std::string &p) const {
        const fs::path path(p);
        return path.is_absolute() ? path : base / path;
    }
};

void allow_keys(const json &obj, const char *where, std::initializer_list<const char *> keys) {
    if (!obj.is_object()) {
        config_error(std::string(where) + " must be an object");
    }
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto &item : obj.items()) {
        if (!allowed.count(item.key())) {
            config_error("unknown key '" + item.key() + "' in " + where);
        }
    }
}

double number(const json &obj, const char *key, const char *where) {
    if (!obj.contains(key)) {
        config_error(std::string("missing '") + key + "' in " + where);
    }
    if (!obj.at(key).is_number()) {
        config_error(std::string("'") + key + "' in " + where + " must be a number");
    }
    const double v = obj.at(key).get<double>();
    if (!std::isfinite(v)) {
        config_error(std::string("'") + key + "' in " + where + " must be finite");
    }
    return v;
}

double number_or(const json &obj, const char *key, const char *where, double fallback) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

int integer_or(const json &obj, const char *key, const char *where, int fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj.at(key).is_number_integer()) {
        config_error(std::string("'") + key + "' in " + where + " must be an integer");
    }
    return obj.at(key).get<int>();
}

std::string string_or(const json &obj, const char *key, const char *where, const std::string &fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj.at(key).is_string()) {
        config_error(std::string("'") + key + "' in " + where + " must be a string");
    }
    return obj.at(key).get<std::string>();
}

// A rate given either as <name>_hz (converted with 2 pi) or <name>_rad_s.
double rate(const json &obj, const std::string &name, const char *where, double fallback_rad_s) {
    const std::string hz = name + "_hz";
    const std::string rad = name + "_rad_s";
    const bool has_hz = obj.contains(hz);
    const bool has_rad = obj.contains(rad);
    if (has_hz && has_rad) {
        config_error("give either " + hz + " or " + rad + " in " + where + ", not both");
    }
    double v = fallback_rad_s;
    if (has_hz) {
        v = 2.0 * std::numbers::pi * number(obj, hz.c_str(), where);
    } else if (has_rad) {
        v = number(obj, rad.c_str(), where);
    }
    if (!(v > 0.0)) {
        config_error(name + " in " + where + " must be positive");
    }
    return v;
}

Config load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        config_error("cannot open config file " + path);
    }
    Config c;
    try {
        c.root = json::parse(in);
    } catch (const json::exception &e) {
        config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!c.root.is_object()) {
        config_error("config root must be an object");
    }
    c.base = fs::absolute(path).parent_path();
    allow_keys(c.root, "config",
               {"pattern", "crystal", "protocol", "physics", "numerics", "rwa_study", "expansion_path",
                "schedule_path"});
    return c;
}

struct Physics {
    double strength;
    double omega;
};

Physics read_physics(const Config &c) {
    const json &p = c.section("physics");
    allow_keys(p, "physics", {"U_hz", "U_rad_s", "omega_hz", "omega_rad_s", "beam_angle_rad"});
    Physics out{rate(p, "U", "physics", 2.0 * std::numbers::pi * 10e3),
                rate(p, "omega", "physics", 2.0 * std::numbers::pi * 180e3)};
    const double theta = number_or(p, "beam_angle_rad", "physics", std::numbers::pi / 2);
    if (!(theta > 0.0 && theta <= std::numbers::pi / 2 + 1e-15)) {
        config_error("beam_angle_rad must lie in (0, pi/2]");
    }
    return out;
}

Pattern read_pattern(const Config &c) {
    if (!c.root.contains("pattern")) {
        config_error("missing 'pattern' section");
    }
    const json &p = c.section("pattern");
    const std::string kind = string_or(p, "kind", "pattern", "");
    zpc_pattern *raw = nullptr;
    if (kind == "annulus") {
        allow_keys(p, "pattern", {"kind", "A", "r1", "r2", "kappa"});
        check(zpc_pattern_annulus(number(p, "A", "pattern"), number(p, "r1", "pattern"), number(p, "r2", "pattern"),
                                  number(p, "kappa", "pattern"), &raw));
    } else if (kind == "elliptical_gaussian") {
        allow_keys(p, "pattern", {"kind", "A", "eta_x", "eta_y"});
        check(zpc_pattern_elliptical(number(p, "A", "pattern"), number(p, "eta_x", "pattern"),
                                     number(p, "eta_y", "pattern"), &raw));
    } else if (kind == "displaced_gaussian") {
        allow_keys(p, "pattern", {"kind", "A", "eta", "delta_x", "delta_y"});
        check(zpc_pattern_displaced(number(p, "A", "pattern"), number(p, "eta", "pattern"),
                                    number(p, "delta_x", "pattern"), number(p, "delta_y", "pattern"), &raw));
    } else if (kind == "tabulated") {
        allow_keys(p, "pattern", {"kind", "A", "path"});
        const std::string path = string_or(p, "path", "pattern", "");
        if (path.empty()) {
            config_error("tabulated pattern needs 'path'");
        }
        check(zpc_pattern_load_csv(c.resolve(path).c_str(), number_or(p, "A", "pattern", 0.0), &raw));
    } else {
        config_error("pattern.kind must be annulus, elliptical_gaussian, displaced_gaussian or tabulated");
    }
    return Pattern(raw);
}

Crystal read_crystal(const Config &c, double omega) {
    const json &s = c.section("crystal");
    allow_keys(s, "crystal", {"shells", "spacing", "orientation_rad", "path"});
    zpc_crystal *raw = nullptr;
    if (s.contains("path")) {
        if (s.contains("shells") || s.contains("spacing") || s.contains("orientation_rad")) {
            config_error("crystal takes either 'path' or lattice parameters, not both");
        }
        check(zpc_crystal_load_csv(c.resolve(string_or(s, "path", "crystal", "")).c_str(), omega, &raw));
    } else {
        check(zpc_crystal_hex(integer_or(s, "shells", "crystal", 5), number_or(s, "spacing", "crystal", 0.2), omega,
                              number_or(s, "orientation_rad", "crystal", 0.0), &raw));
    }
    return Crystal(raw);
}

struct Protocol {
    zpc_mode mode;
    int n_max;
    int m_max;
    double psi;
    int segment_rotations;
    int total_rotations;
    double dm_reset_time;
};

Protocol read_protocol(const Config &c) {
    const json &p = c.section("protocol");
    allow_keys(p, "protocol",
               {"mode", "n_max", "m_max", "psi_rad", "segment_rotations", "total_rotations", "dm_reset_time_s"});
    Protocol out{};
    const std::string mode = string_or(p, "mode", "protocol", "serial");
    if (mode != "serial" && mode != "parallel") {
        config_error("protocol.mode must be serial or parallel");
    }
    out.mode = mode == "serial" ? ZPC_MODE_SERIAL : ZPC_MODE_PARALLEL;
    out.n_max = integer_or(p, "n_max", "protocol", -1);
    out.m_max = integer_or(p, "m_max", "protocol", -1);
    out.psi = number_or(p, "psi_rad", "protocol", -std::numbers::pi / 2);
    out.segment_rotations = integer_or(p, "segment_rotations", "protocol", 0);
    out.total_rotations = integer_or(p, "total_rotations", "protocol", 1);
    out.dm_reset_time = number_or(p, "dm_reset_time_s", "protocol", 0.0);
    if (out.segment_rotations < 0 || out.total_rotations < 1) {
        config_error("segment_rotations must be >= 0 and total_rotations >= 1");
    }
    if (out.dm_reset_time < 0.0) {
        config_error("dm_reset_time_s must be non-negative");
    }
    return out;
}

struct Numerics {
    double rel_tol;
    int map_rho;
    int map_phi;
    double tolerance;
    int bessel_terms;
    zpc_method method;
};

Numerics read_numerics(const Config &c, double tolerance_flag) {
    const json &n = c.section("numerics");
    allow_keys(n, "numerics",
               {"quadrature_rel_tol", "error_map_rho", "error_map_phi", "exact_tolerance", "bessel_terms", "method"});
    Numerics out{};
    out.rel_tol = number_or(n, "quadrature_rel_tol", "numerics", 1e-9);
    out.map_rho = integer_or(n, "error_map_rho", "numerics", 256);
    out.map_phi = integer_or(n, "error_map_phi", "numerics", 512);
    out.tolerance = tolerance_flag > 0.0 ? tolerance_flag : number_or(n, "exact_tolerance", "numerics", 1e-12);
    out.bessel_terms = integer_or(n, "bessel_terms", "numerics", 24);
    const std::string method = string_or(n, "method", "numerics", "exact");
    if (method == "exact") {
        out.method = ZPC_METHOD_EXACT;
    } else if (method == "bessel") {
        out.method = ZPC_METHOD_BESSEL;
    } else if (method == "rwa") {
        out.method = ZPC_METHOD_RWA;
    } else {
        config_error("numerics.method must be exact, bessel or rwa");
    }
    if (!(out.rel_tol > 0.0)) {
        config_error("quadrature_rel_tol must be positive");
    }
    if (out.map_rho < 64 || out.map_phi < 128) {
        config_error("error map grid must be at least 64 x 128");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output helpers

void ensure_out(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw CliError{kExitConfig, "io", "cannot create output directory " + dir.string()};
    }
}

void write_json(const fs::path &path, const json &j) {
    std::ofstream out(path);
    if (!out) {
        throw CliError{kExitConfig, "io", "cannot write " + path.string()};
    }
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Subcommands

struct Common {
    std::string config;
    std::string out;
    int threads = 0;
    double tolerance = 0.0;
};

void cmd_decompose(const Common &opt) {
    const Config c = load_config(opt.config);
    Pattern pattern = read_pattern(c);
    const Physics phys = read_physics(c);
    const Protocol proto = read_protocol(c);
    const Numerics num = read_numerics(c, opt.tolerance);
    if (proto.n_max < 0 || proto.m_max < 0) {
        config_error("protocol.n_max and protocol.m_max are required");
    }
    if (proto.n_max < proto.m_max) {
        config_error("protocol.n_max must be >= protocol.m_max");
    }
    Crystal crystal = read_crystal(c, phys.omega);
    ensure_out(opt.out);
    const fs::path out(opt.out);

    zpc_expansion *raw = nullptr;
    check(zpc_decompose(pattern.get(), proto.n_max, proto.m_max, num.rel_tol, &raw));
    Expansion expansion(raw);
    check(zpc_expansion_save_json(expansion.get(), (out / "expansion.json").c_str()));
    double disk_max = 0.0;
    double ion_max = 0.0;
    check(zpc_error_map_save(pattern.get(), expansion.get(), crystal.get(), num.map_rho, num.map_phi,
                             (out / "error_map.csv").c_str(), &disk_max, &ion_max));
    size_t terms = 0;
    check(zpc_expansion_term_count(expansion.get(), &terms));
    write_json(out / "decompose.json", {{"n_max", proto.n_max},
                                        {"m_max", proto.m_max},
                                        {"nonzero_terms", terms},
                                        {"error_disk_max", disk_max},
                                        {"error_ion_max", ion_max}});
}

fs::path input_path(const Config &c, const std::string &flag, const char *key, const fs::path &fallback) {
    if (!flag.empty()) {
        return flag;
    }
    if (c.root.contains(key)) {
        return c.resolve(string_or(c.root, key, "config", ""));
    }
    return fallback;
}

void cmd_plan(const Common &opt, const std::string &expansion_flag) {
    const Config c = load_config(opt.config);
    const Physics phys = read_physics(c);
    const Protocol proto = read_protocol(c);
    ensure_out(opt.out);
    const fs::path out(opt.out);
    const fs::path exp_path = input_path(c, expansion_flag, "expansion_path", out / "expansion.json");

    zpc_expansion *raw = nullptr;
    check(zpc_expansion_load_json(exp_path.c_str(), &raw));
    Expansion expansion(raw);
    const int rotations = proto.mode == ZPC_MODE_SERIAL ? proto.segment_rotations : proto.total_rotations;
    zpc_schedule *sraw = nullptr;
    check(zpc_plan(expansion.get(), proto.mode, phys.strength, phys.omega, proto.psi, rotations, proto.dm_reset_time,
                   &sraw));
    Schedule schedule(sraw);
    check(zpc_schedule_save_json(schedule.get(), (out / "schedule.json").c_str()));
    const char *diag = nullptr;
    int warnings = 0;
    check(zpc_schedule_validate(schedule.get(), phys.omega, &diag, &warnings));
    const json report = json::parse(diag);
    write_json(out / "validation.json", report);
    for (const auto &w : report.at("warnings")) {
        std::cerr << "warning: " << w.get<std::string>() << "\n";
    }
}

void cmd_simulate(const Common &opt, const std::string &schedule_flag) {
    const Config c = load_config(opt.config);
    read_physics(c);
    const Numerics num = read_numerics(c, opt.tolerance);
    Pattern pattern = read_pattern(c);
    ensure_out(opt.out);
    const fs::path out(opt.out);
    const fs::path sched_path = input_path(c, schedule_flag, "schedule_path", out / "schedule.json");

    zpc_schedule *sraw = nullptr;
    check(zpc_schedule_load_json(sched_path.c_str(), &sraw));
    Schedule schedule(sraw);
    double omega = 0.0;
    check(zpc_schedule_omega(schedule.get(), &omega));
    Crystal crystal = read_crystal(c, omega);

    zpc_result *rraw = nullptr;
    check(zpc_evolve(crystal.get(), schedule.get(), num.method, num.tolerance, num.bessel_terms, &rraw));
    Result result(rraw);
    check(zpc_result_set_target(result.get(), crystal.get(), pattern.get(), schedule.get()));
    check(zpc_result_save(result.get(), (out / "evolution.csv").c_str(), (out / "evolution.json").c_str()));
    check(zpc_result_save_histogram(result.get(), (out / "histogram.csv").c_str()));
    double max_inf = 0.0;
    check(zpc_result_max_infidelity(result.get(), &max_inf));
    double pulse = 0.0;
    double wall = 0.0;
    check(zpc_schedule_times(schedule.get(), &pulse, &wall));
    size_t ions = 0;
    check(zpc_result_size(result.get(), &ions));
    write_json(out / "report.json", {{"ion_count", ions},
                                     {"max_infidelity", max_inf},
                                     {"gate_time_s", pulse},
                                     {"wall_time_s", wall},
                                     {"tolerance", num.tolerance}});
}

void cmd_rwa_study(const Common &opt) {
    const Config c = load_config(opt.config);
    const Physics phys = read_physics(c);
    const Numerics num = read_numerics(c, opt.tolerance);
    const json &r = c.section("rwa_study");
    allow_keys(r, "rwa_study", {"omega_hz", "omega_rad_s", "A", "m", "samples", "t_max_s"});
    std::vector<double> omegas;
    if (r.contains("omega_hz") && r.contains("omega_rad_s")) {
        config_error("give either rwa_study.omega_hz or rwa_study.omega_rad_s, not both");
    }
    if (r.contains("omega_hz") || r.contains("omega_rad_s")) {
        const bool hz = r.contains("omega_hz");
        const json &list = r.at(hz ? "omega_hz" : "omega_rad_s");
        if (!list.is_array() || list.empty()) {
            config_error("rwa_study omega list must be a non-empty array");
        }
        for (const auto &v : list) {
            if (!v.is_number()) {
                config_error("rwa_study omega entries must be numbers");
            }
            omegas.push_back(hz ? 2.0 * std::numbers::pi * v.get<double>() : v.get<double>());
        }
    } else {
        omegas = {2.0 * std::numbers::pi * 43.8e3, phys.omega};
    }
    ensure_out(opt.out);
    check(zpc_rwa_study(omegas.data(), omegas.size(), phys.strength, number_or(r, "A", "rwa_study", 0.25),
                        integer_or(r, "m", "rwa_study", 1), integer_or(r, "samples", "rwa_study", 1000),
                        number_or(r, "t_max_s", "rwa_study", 0.0), num.tolerance, opt.out.c_str()));
}

void cmd_reproduce(const Common &opt, const std::string &figure) {
    ensure_out(opt.out);
    int passed = 0;
    check(zpc_reproduce(figure.c_str(), opt.tolerance > 0.0 ? opt.tolerance : 1e-12, opt.out.c_str(), &passed));
    std::cout << figure << ": " << (passed ? "all runs within threshold" : "threshold exceeded") << "\n";
}

void report_failure(const CliError &e, const std::string &out_dir) {
    const json record = {{"error", {{"exit_code", e.exit_code}, {"kind", e.kind}, {"message", e.message}}}};
    std::cerr << record.dump() << "\n";
    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        std::ofstream out(fs::path(out_dir) / "error.json");
        if (out) {
            out << record.dump(2) << "\n";
        }
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"zpc: Zernike pattern compiler and spin-phase simulator"};
    app.require_subcommand(1);
    Common opt;
    std::string expansion_flag;
    std::string schedule_flag;
    std::string figure;

    auto add_common = [&](CLI::App *sub, bool needs_config) {
        auto *cfg = sub->add_option("--config", opt.config, "JSON run configuration");
        if (needs_config) {
            cfg->required();
        }
        sub->add_option("--out", opt.out, "output directory")->required();
        sub->add_option("--threads", opt.threads, "worker cap (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->add_option("--tolerance", opt.tolerance, "absolute tolerance of the phase integrals")
            ->check(CLI::PositiveNumber);
    };

    auto *decompose = app.add_subcommand("decompose", "pattern -> Zernike expansion and truncation-error map");
    add_common(decompose, true);
    auto *plan = app.add_subcommand("plan", "expansion -> pulse schedule and validation report");
    add_common(plan, true);
    plan->add_option("--expansion", expansion_flag, "expansion JSON (default: <out>/expansion.json)");
    auto *simulate = app.add_subcommand("simulate", "schedule -> per-ion evolution and infidelity");
    add_common(simulate, true);
    simulate->add_option("--schedule", schedule_flag, "schedule JSON (default: <out>/schedule.json)");
    auto *rwa = app.add_subcommand("rwa-study", "exact versus RWA time series at (rho, phi) = (1, 0)");
    add_common(rwa, true);
    auto *reproduce = app.add_subcommand("reproduce", "run a reference case study");
    add_common(reproduce, false);
    reproduce->add_option("figure", figure, "fig2 .. fig12")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        check(zpc_set_threads(opt.threads));
        if (decompose->parsed()) {
            cmd_decompose(opt);
        } else if (plan->parsed()) {
            cmd_plan(opt, expansion_flag);
        } else if (simulate->parsed()) {
            cmd_simulate(opt, schedule_flag);
        } else if (rwa->parsed()) {
            cmd_rwa_study(opt);
        } else if (reproduce->parsed()) {
            cmd_reproduce(opt, figure);
        }
    } catch (const CliError &e) {
        report_failure(e, opt.out);
        return e.exit_code;
    } catch (const json::exception &e) {
        report_failure(CliError{kExitConfig, "config", e.what()}, opt.out);
        return kExitConfig;
    }
    return kExitOk;
}
