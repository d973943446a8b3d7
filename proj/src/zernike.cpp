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

#include "zpc/zernike.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "zpc/error.hpp"
#include "zpc/quadrature.hpp"

namespace zpc {

using nlohmann::json;

ZernikeExpansion::ZernikeExpansion(double amplitude, int n_max, int m_max, double peak)
    : amplitude_(amplitude), n_max_(n_max), m_max_(m_max), peak_(peak > 0.0 ? peak : amplitude) {
    require(std::isfinite(amplitude) && amplitude > 0.0, "expansion amplitude must be positive");
    require(m_max >= 0 && n_max >= m_max, "expansion needs n_max >= m_max >= 0");
    require(n_max <= 128, "expansion n_max must not exceed 128");
}

void ZernikeExpansion::set(const ZernikeIndex &idx, double alpha) {
    require(idx.n() <= n_max_ && idx.abs_m() <= m_max_,
            "coefficient " + idx.str() + " lies outside (n_max, m_max)");
    require(std::isfinite(alpha), "coefficient is not finite");
    coefficients_[idx] = alpha;
}

double ZernikeExpansion::coefficient(int n, int m) const {
    if (!ZernikeIndex::is_valid(n, m)) {
        return 0.0;
    }
    auto it = coefficients_.find(ZernikeIndex(n, m));
    return it == coefficients_.end() ? 0.0 : it->second;
}

double ZernikeExpansion::reconstruct(double rho, double phi) const {
    require(rho >= 0.0 && rho <= 1.0, "reconstruct: rho outside [0, 1]");
    double sum = 0.0;
    for (const auto &[idx, alpha] : coefficients_) {
        sum += alpha * zernike_eval(idx, rho, phi);
    }
    return amplitude_ * sum;
}

std::string ZernikeExpansion::to_json() const {
    json j;
    j["A"] = amplitude_;
    j["peak"] = peak_;
    j["n_max"] = n_max_;
    j["m_max"] = m_max_;
    json coeffs = json::array();
    for (const auto &[idx, alpha] : coefficients_) {
        if (std::fabs(alpha) < kCoefficientFloor) {
            continue;
        }
        coeffs.push_back({{"n", idx.n()}, {"m", idx.m()}, {"alpha", alpha}});
    }
    j["coefficients"] = coeffs;
    return j.dump(2);
}

ZernikeExpansion ZernikeExpansion::from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
        ZernikeExpansion e(j.at("A").get<double>(), j.at("n_max").get<int>(), j.at("m_max").get<int>(),
                           j.value("peak", 0.0));
        for (const auto &c : j.at("coefficients")) {
            e.set(ZernikeIndex(c.at("n").get<int>(), c.at("m").get<int>()), c.at("alpha").get<double>());
        }
        return e;
    } catch (const json::exception &ex) {
        fail(ErrorCode::kInvalidArgument, std::string("malformed expansion JSON: ") + ex.what());
    }
}

void ZernikeExpansion::save_json(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write " + path.string());
    }
    out << to_json() << "\n";
}

ZernikeExpansion ZernikeExpansion::load_json(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::kIo, "cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

RadialProfileSet::RadialProfileSet(const ZernikeExpansion &expansion)
    : amplitude_(expansion.amplitude()), m_max_(expansion.m_max()) {
    even_.resize(static_cast<size_t>(m_max_ + 1));
    odd_.resize(static_cast<size_t>(m_max_ + 1));
    for (int m = 0; m <= m_max_; ++m) {
        const int count = (expansion.n_max() - m) / 2 + 1;
        auto &e = even_[static_cast<size_t>(m)];
        auto &o = odd_[static_cast<size_t>(m)];
        e.assign(static_cast<size_t>(count), 0.0);
        o.assign(static_cast<size_t>(count), 0.0);
        for (int k = 0; k < count; ++k) {
            e[static_cast<size_t>(k)] = expansion.coefficient(m + 2 * k, m);
            if (m > 0) {
                o[static_cast<size_t>(k)] = expansion.coefficient(m + 2 * k, -m);
            }
        }
    }
}

namespace {

double sum_terms(const std::vector<double> &terms, int m, double rho, std::vector<double> &scratch) {
    scratch.resize(terms.size());
    zernike_radial_all(m, rho, scratch);
    double s = 0.0;
    for (size_t k = 0; k < terms.size(); ++k) {
        s += terms[k] * scratch[k];
    }
    return s;
}

bool any_above_floor(const std::vector<double> &v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return std::fabs(x) >= kCoefficientFloor; });
}

}  // namespace

double RadialProfileSet::p(int m, double rho) const {
    require(m >= 0 && m <= m_max_, "radial profile order out of range");
    std::vector<double> scratch;
    return sum_terms(even_[static_cast<size_t>(m)], m, rho, scratch);
}

double RadialProfileSet::q(int m, double rho) const {
    require(m >= 0 && m <= m_max_, "radial profile order out of range");
    std::vector<double> scratch;
    return sum_terms(odd_[static_cast<size_t>(m)], m, rho, scratch);
}

void RadialProfileSet::evaluate(double rho, std::span<double> p_out, std::span<double> q_out) const {
    std::vector<double> scratch;
    for (int m = 0; m <= m_max_; ++m) {
        const auto &e = even_[static_cast<size_t>(m)];
        const auto &o = odd_[static_cast<size_t>(m)];
        scratch.resize(e.size());
        zernike_radial_all(m, rho, scratch);
        double ps = 0.0;
        double qs = 0.0;
        for (size_t k = 0; k < e.size(); ++k) {
            ps += e[k] * scratch[k];
            qs += o[k] * scratch[k];
        }
        p_out[static_cast<size_t>(m)] = ps;
        q_out[static_cast<size_t>(m)] = qs;
    }
}

bool RadialProfileSet::has_even(int m) const {
    return m >= 0 && m <= m_max_ && any_above_floor(even_[static_cast<size_t>(m)]);
}

bool RadialProfileSet::has_odd(int m) const {
    return m > 0 && m <= m_max_ && any_above_floor(odd_[static_cast<size_t>(m)]);
}

namespace {

double inner_product_once(const DiskFunction &f, const DiskFunction &g, const DiskRule &rule) {
    double total = 0.0;
    for (size_t i = 0; i < rule.rho.size(); ++i) {
        double ring = 0.0;
        for (double phi : rule.phi) {
            ring += f(rule.rho[i], phi) * g(rule.rho[i], phi);
        }
        total += rule.radial_weight[i] * rule.azimuthal_weight * ring;
    }
    return total;
}

// Coefficients keyed like the expansion, computed on one fixed rule.
std::vector<double> project_once(const DiskFunction &f, double amplitude, int n_max, int m_max,
                                 const DiskRule &rule) {
    const size_t nr = rule.rho.size();
    const size_t np = rule.phi.size();
    // Angular transforms C_m(rho_i), S_m(rho_i).
    std::vector<double> cos_tr(nr * static_cast<size_t>(m_max + 1), 0.0);
    std::vector<double> sin_tr(nr * static_cast<size_t>(m_max + 1), 0.0);
    std::vector<double> samples(np);
    std::vector<double> cos_table(np * static_cast<size_t>(m_max + 1));
    std::vector<double> sin_table(np * static_cast<size_t>(m_max + 1));
    for (int m = 0; m <= m_max; ++m) {
        for (size_t j = 0; j < np; ++j) {
            cos_table[static_cast<size_t>(m) * np + j] = std::cos(m * rule.phi[j]);
            sin_table[static_cast<size_t>(m) * np + j] = std::sin(m * rule.phi[j]);
        }
    }
    for (size_t i = 0; i < nr; ++i) {
        for (size_t j = 0; j < np; ++j) {
            samples[j] = f(rule.rho[i], rule.phi[j]) / amplitude;
        }
        for (int m = 0; m <= m_max; ++m) {
            double c = 0.0;
            double s = 0.0;
            for (size_t j = 0; j < np; ++j) {
                c += samples[j] * cos_table[static_cast<size_t>(m) * np + j];
                s += samples[j] * sin_table[static_cast<size_t>(m) * np + j];
            }
            cos_tr[static_cast<size_t>(m) * nr + i] = c * rule.azimuthal_weight;
            sin_tr[static_cast<size_t>(m) * nr + i] = s * rule.azimuthal_weight;
        }
    }
    // Layout: for m = 0..m_max, k = 0..K_m: even then odd.
    std::vector<double> out;
    std::vector<double> radial;
    for (int m = 0; m <= m_max; ++m) {
        const int count = (n_max - m) / 2 + 1;
        std::vector<double> even(static_cast<size_t>(count), 0.0);
        std::vector<double> odd(static_cast<size_t>(count), 0.0);
        radial.resize(static_cast<size_t>(count));
        for (size_t i = 0; i < nr; ++i) {
            zernike_radial_all(m, rule.rho[i], radial);
            const double wc = rule.radial_weight[i] * cos_tr[static_cast<size_t>(m) * nr + i];
            const double ws = rule.radial_weight[i] * sin_tr[static_cast<size_t>(m) * nr + i];
            for (int k = 0; k < count; ++k) {
                even[static_cast<size_t>(k)] += wc * radial[static_cast<size_t>(k)];
                odd[static_cast<size_t>(k)] += ws * radial[static_cast<size_t>(k)];
            }
        }
        const double eps = m == 0 ? 2.0 : 1.0;
        for (int k = 0; k < count; ++k) {
            const int n = m + 2 * k;
            const double norm = (2.0 * n + 2.0) / (eps * std::numbers::pi);
            out.push_back(norm * even[static_cast<size_t>(k)]);
            out.push_back(m == 0 ? 0.0 : norm * odd[static_cast<size_t>(k)]);
        }
    }
    return out;
}

}  // namespace

double disk_inner_product(const DiskFunction &f, const DiskFunction &g, const DiskQuadratureSpec &spec) {
    int nr = spec.radial_nodes;
    int np = spec.azimuthal_nodes;
    double prev = inner_product_once(f, g, DiskRule::make(nr, np));
    for (int r = 0; r < spec.max_refinements; ++r) {
        nr *= 2;
        np *= 2;
        const double next = inner_product_once(f, g, DiskRule::make(nr, np));
        if (std::fabs(next - prev) <= spec.rel_tol * std::max(1.0, std::fabs(next))) {
            return next;
        }
        prev = next;
    }
    fail(ErrorCode::kNumerical, "disk quadrature did not converge");
}

ZernikeExpansion decompose(const DiskFunction &f, double amplitude, double peak, int n_max, int m_max,
                           const DiskQuadratureSpec &spec) {
    ZernikeExpansion expansion(amplitude, n_max, m_max, peak);
    int nr = spec.radial_nodes;
    int np = spec.azimuthal_nodes;
    std::vector<double> prev = project_once(f, amplitude, n_max, m_max, DiskRule::make(nr, np));
    bool converged = spec.max_refinements == 0;
    for (int r = 0; r < spec.max_refinements && !converged; ++r) {
        nr *= 2;
        np *= 2;
        std::vector<double> next = project_once(f, amplitude, n_max, m_max, DiskRule::make(nr, np));
        double scale = 1.0;
        double diff = 0.0;
        for (size_t i = 0; i < next.size(); ++i) {
            scale = std::max(scale, std::fabs(next[i]));
            diff = std::max(diff, std::fabs(next[i] - prev[i]));
        }
        converged = diff <= spec.rel_tol * scale;
        prev = std::move(next);
    }
    if (!converged) {
        fail(ErrorCode::kNumerical, "Zernike projection did not converge under quadrature refinement");
    }
    size_t pos = 0;
    for (int m = 0; m <= m_max; ++m) {
        const int count = (n_max - m) / 2 + 1;
        for (int k = 0; k < count; ++k) {
            const int n = m + 2 * k;
            expansion.set(ZernikeIndex(n, m), prev[pos]);
            if (m > 0) {
                expansion.set(ZernikeIndex(n, -m), prev[pos + 1]);
            }
            pos += 2;
        }
    }
    return expansion;
}

ZernikeExpansion decompose(const TargetPattern &pattern, int n_max, int m_max, const DiskQuadratureSpec &spec) {
    require(m_max >= 0 && n_max >= m_max, "decompose: need n_max >= m_max >= 0");
    return decompose([&](double rho, double phi) { return pattern(rho, phi); }, pattern.amplitude(), pattern.peak(),
                     n_max, m_max, spec);
}

TruncationErrorMap truncation_error_map(const TargetPattern &pattern, const ZernikeExpansion &expansion, int n_rho,
                                        int n_phi, std::span<const PolarPoint> ions) {
    require(n_rho >= 2 && n_phi >= 1, "truncation_error_map: grid too small");
    const RadialProfileSet profiles(expansion);
    const int m_max = expansion.m_max();
    // Normalized to the pattern maximum, which is A/2 for the Gaussians.
    const double a = expansion.amplitude();
    const double peak = pattern.peak();
    require(peak > 0.0, "truncation_error_map: pattern maximum must be positive");
    TruncationErrorMap map;
    map.n_rho = n_rho;
    map.n_phi = n_phi;
    map.rho.resize(static_cast<size_t>(n_rho));
    map.phi.resize(static_cast<size_t>(n_phi));
    for (int i = 0; i < n_rho; ++i) {
        map.rho[static_cast<size_t>(i)] = static_cast<double>(i) / (n_rho - 1);
    }
    for (int j = 0; j < n_phi; ++j) {
        map.phi[static_cast<size_t>(j)] = 2.0 * std::numbers::pi * j / n_phi;
    }
    std::vector<double> p(static_cast<size_t>(m_max + 1));
    std::vector<double> q(static_cast<size_t>(m_max + 1));
    auto approx_at = [&](double phi) {
        double s = p[0];
        for (int m = 1; m <= m_max; ++m) {
            s += p[static_cast<size_t>(m)] * std::cos(m * phi) + q[static_cast<size_t>(m)] * std::sin(m * phi);
        }
        return a * s;
    };
    map.error.resize(static_cast<size_t>(n_rho) * static_cast<size_t>(n_phi));
    for (int i = 0; i < n_rho; ++i) {
        const double rho = map.rho[static_cast<size_t>(i)];
        profiles.evaluate(rho, p, q);
        for (int j = 0; j < n_phi; ++j) {
            const double phi = map.phi[static_cast<size_t>(j)];
            const double e = std::fabs(pattern(rho, phi) - approx_at(phi)) / peak;
            map.error[static_cast<size_t>(i) * static_cast<size_t>(n_phi) + static_cast<size_t>(j)] = e;
            map.disk_max = std::max(map.disk_max, e);
        }
    }
    for (const auto &ion : ions) {
        profiles.evaluate(ion.rho, p, q);
        const double e = std::fabs(pattern(ion.rho, ion.phi) - approx_at(ion.phi)) / peak;
        map.ion_error.push_back(e);
        map.ion_max = std::max(map.ion_max, e);
        map.disk_max = std::max(map.disk_max, e);
    }
    return map;
}

void TruncationErrorMap::save_csv(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write " + path.string());
    }
    out << "rho,phi,error\n";
    char buf[128];
    for (int i = 0; i < n_rho; ++i) {
        for (int j = 0; j < n_phi; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", rho[static_cast<size_t>(i)],
                          phi[static_cast<size_t>(j)],
                          error[static_cast<size_t>(i) * static_cast<size_t>(n_phi) + static_cast<size_t>(j)]);
            out << buf;
        }
    }
}

}  // namespace zpc
