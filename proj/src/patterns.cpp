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

#include "zpc/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "zpc/error.hpp"

namespace zpc {

namespace {

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

double annulus_profile(const AnnulusShape &s, double rho) {
    return sigmoid(s.kappa * (rho - s.r1)) - sigmoid(s.kappa * (rho - s.r2));
}

double wrap_phase(double phi) {
    const double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(phi, two_pi);
    if (w < 0.0) {
        w += two_pi;
    }
    return w;
}

double interpolate_table(const TabulatedShape &t, double rho, double phi) {
    const size_t nr = t.rho.size();
    const size_t np = t.phi.size();
    auto it = std::upper_bound(t.rho.begin(), t.rho.end(), rho);
    size_t i1 = static_cast<size_t>(it - t.rho.begin());
    if (i1 >= nr) {
        i1 = nr - 1;
    }
    if (i1 == 0) {
        i1 = 1;
    }
    const size_t i0 = i1 - 1;
    const double fr = (rho - t.rho[i0]) / (t.rho[i1] - t.rho[i0]);

    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(np);
    const double rel = wrap_phase(phi - t.phi[0]) / dphi;
    size_t j0 = static_cast<size_t>(std::floor(rel));
    double fp = rel - static_cast<double>(j0);
    j0 %= np;
    const size_t j1 = (j0 + 1) % np;

    auto at = [&](size_t i, size_t j) { return t.values[i * np + j]; };
    const double lo = (1.0 - fp) * at(i0, j0) + fp * at(i0, j1);
    const double hi = (1.0 - fp) * at(i1, j0) + fp * at(i1, j1);
    return (1.0 - fr) * lo + fr * hi;
}

}  // namespace

TargetPattern::TargetPattern(double amplitude, Shape shape) : amplitude_(amplitude), shape_(std::move(shape)) {
    require(std::isfinite(amplitude_) && amplitude_ > 0.0, "pattern amplitude must be positive and finite");
    if (const auto *a = std::get_if<AnnulusShape>(&shape_)) {
        // The sigmoid difference is symmetric about the annulus midline, where
        // it peaks.
        annulus_norm_ = annulus_profile(*a, a->r1 + 0.5 * (a->r2 - a->r1));
        peak_ = amplitude_;
    } else if (std::holds_alternative<EllipticalGaussianShape>(shape_) ||
               std::holds_alternative<DisplacedGaussianShape>(shape_)) {
        peak_ = 0.5 * amplitude_;
    } else {
        const auto &t = std::get<TabulatedShape>(shape_);
        double m = 0.0;
        for (double v : t.values) {
            m = std::max(m, std::fabs(v));
        }
        peak_ = m;
    }
}

TargetPattern TargetPattern::annulus(double amplitude, double r1, double r2, double kappa) {
    require(r1 > 0.0 && r1 < r2 && r2 <= 1.0, "annulus: need 0 < r1 < r2 <= 1");
    require(kappa > 0.0 && std::isfinite(kappa), "annulus: kappa must be positive");
    return TargetPattern(amplitude, AnnulusShape{r1, r2, kappa});
}

TargetPattern TargetPattern::elliptical_gaussian(double amplitude, double eta_x, double eta_y) {
    require(eta_x > 0.0 && eta_y > 0.0, "elliptical_gaussian: widths must be positive");
    return TargetPattern(amplitude, EllipticalGaussianShape{eta_x, eta_y});
}

TargetPattern TargetPattern::displaced_gaussian(double amplitude, double eta, double delta_x, double delta_y) {
    require(eta > 0.0, "displaced_gaussian: width must be positive");
    require(std::hypot(delta_x, delta_y) < 1.0, "displaced_gaussian: displacement lies outside the unit disk");
    return TargetPattern(amplitude, DisplacedGaussianShape{eta, delta_x, delta_y});
}

TargetPattern TargetPattern::tabulated(double amplitude, TabulatedShape table) {
    const size_t nr = table.rho.size();
    const size_t np = table.phi.size();
    require(nr >= 2 && np >= 2, "tabulated pattern: need at least a 2x2 grid");
    require(table.values.size() == nr * np, "tabulated pattern: value count does not match grid");
    require(table.rho.front() == 0.0 && table.rho.back() == 1.0, "tabulated pattern: rho grid must span [0, 1]");
    for (size_t i = 1; i < nr; ++i) {
        require(table.rho[i] > table.rho[i - 1], "tabulated pattern: rho grid must be strictly increasing");
    }
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(np);
    for (size_t j = 1; j < np; ++j) {
        require(std::fabs(table.phi[j] - table.phi[j - 1] - dphi) < 1e-9,
                "tabulated pattern: phi grid must be uniform over one period");
    }
    for (double v : table.values) {
        require(std::isfinite(v), "tabulated pattern: non-finite sample");
        require(std::fabs(v) <= amplitude * (1.0 + 1e-12), "tabulated pattern: |F| exceeds amplitude");
    }
    return TargetPattern(amplitude, std::move(table));
}

TargetPattern TargetPattern::load_csv(const std::filesystem::path &path, std::optional<double> amplitude) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::kIo, "cannot open pattern file " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        fail(ErrorCode::kInvalidArgument, "pattern file is empty: " + path.string());
    }
    std::map<double, std::map<double, double>> grid;
    std::vector<double> phis;
    size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double rho = 0.0;
        double phi = 0.0;
        double f = 0.0;
        if (!(ss >> rho >> phi >> f)) {
            fail(ErrorCode::kInvalidArgument, "malformed pattern row: " + line);
        }
        require(rho >= 0.0 && rho <= 1.0, "pattern row has rho outside [0, 1]");
        require(std::isfinite(phi) && std::isfinite(f), "pattern row has non-finite values");
        auto &row = grid[rho];
        require(row.find(phi) == row.end(), "duplicate pattern sample");
        row[phi] = f;
        ++rows;
    }
    require(!grid.empty(), "pattern file has no samples");
    TabulatedShape t;
    for (const auto &[phi, f] : grid.begin()->second) {
        t.phi.push_back(phi);
    }
    for (const auto &[rho, row] : grid) {
        t.rho.push_back(rho);
        require(row.size() == t.phi.size(), "pattern grid is not rectangular");
        size_t j = 0;
        for (const auto &[phi, f] : row) {
            require(phi == t.phi[j], "pattern grid is not rectangular");
            t.values.push_back(f);
            ++j;
        }
    }
    require(rows == t.values.size(), "pattern grid is not rectangular");
    double a = 0.0;
    if (amplitude) {
        a = *amplitude;
    } else {
        for (double v : t.values) {
            a = std::max(a, std::fabs(v));
        }
    }
    return tabulated(a, std::move(t));
}

double TargetPattern::operator()(double rho, double phi) const {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        fail(ErrorCode::kInvalidArgument, "pattern evaluated outside the unit disk");
    }
    return evaluate(rho, phi);
}

double TargetPattern::evaluate(double rho, double phi) const {
    return std::visit(
        [&](const auto &s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, AnnulusShape>) {
                return amplitude_ * annulus_profile(s, rho) / annulus_norm_;
            } else if constexpr (std::is_same_v<S, EllipticalGaussianShape>) {
                const double x = rho * std::cos(phi);
                const double y = rho * std::sin(phi);
                return 0.5 * amplitude_ *
                       std::exp(-x * x / (2.0 * s.eta_x * s.eta_x) - y * y / (2.0 * s.eta_y * s.eta_y));
            } else if constexpr (std::is_same_v<S, DisplacedGaussianShape>) {
                const double dx = rho * std::cos(phi) - s.delta_x;
                const double dy = rho * std::sin(phi) - s.delta_y;
                return 0.5 * amplitude_ * std::exp(-(dx * dx + dy * dy) / (2.0 * s.eta * s.eta));
            } else {
                return interpolate_table(s, rho, phi);
            }
        },
        shape_);
}

std::string TargetPattern::kind_name() const {
    switch (shape_.index()) {
        case 0:
            return "annulus";
        case 1:
            return "elliptical_gaussian";
        case 2:
            return "displaced_gaussian";
        default:
            return "tabulated";
    }
}

}  // namespace zpc
