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

#include "zpc/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "zpc/error.hpp"

namespace zpc {

QuadratureRule gauss_legendre(int count, double lo, double hi) {
    require(count >= 1, "gauss_legendre: need at least one node");
    QuadratureRule rule;
    rule.nodes.assign(static_cast<size_t>(count), 0.0);
    rule.weights.assign(static_cast<size_t>(count), 0.0);
    const int half = (count + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= count; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = count * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) {
                break;
            }
        }
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= count; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = count * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<size_t>(i)] = -x;
        rule.nodes[static_cast<size_t>(count - 1 - i)] = x;
        rule.weights[static_cast<size_t>(i)] = w;
        rule.weights[static_cast<size_t>(count - 1 - i)] = w;
    }
    if (count % 2 == 1) {
        rule.nodes[static_cast<size_t>(count / 2)] = 0.0;
    }
    const double mid = 0.5 * (lo + hi);
    const double scale = 0.5 * (hi - lo);
    for (int i = 0; i < count; ++i) {
        rule.nodes[static_cast<size_t>(i)] = mid + scale * rule.nodes[static_cast<size_t>(i)];
        rule.weights[static_cast<size_t>(i)] *= scale;
    }
    return rule;
}

DiskRule DiskRule::make(int radial_nodes, int azimuthal_nodes) {
    require(radial_nodes >= 1 && azimuthal_nodes >= 1, "DiskRule: node counts must be positive");
    DiskRule rule;
    rule.radial_nodes = radial_nodes;
    rule.azimuthal_nodes = azimuthal_nodes;
    const QuadratureRule r = gauss_legendre(radial_nodes, 0.0, 1.0);
    rule.rho = r.nodes;
    rule.radial_weight.resize(r.nodes.size());
    for (size_t i = 0; i < r.nodes.size(); ++i) {
        rule.radial_weight[i] = r.weights[i] * r.nodes[i];
    }
    rule.phi.resize(static_cast<size_t>(azimuthal_nodes));
    for (int j = 0; j < azimuthal_nodes; ++j) {
        rule.phi[static_cast<size_t>(j)] = 2.0 * std::numbers::pi * j / azimuthal_nodes;
    }
    rule.azimuthal_weight = 2.0 * std::numbers::pi / azimuthal_nodes;
    return rule;
}

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};

// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Panel {
    double kronrod;
    double gauss;
    double kronrod_abs;  // Kronrod estimate of the integral of |f|
};

Panel gk15(const std::function<double(double)> &f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double k = kKronrodWeights[7] * fc;
    double g = kGaussWeights[3] * fc;
    double k_abs = kKronrodWeights[7] * std::fabs(fc);
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[static_cast<size_t>(i)];
        const double lo = f(center - dx);
        const double hi = f(center + dx);
        k += kKronrodWeights[static_cast<size_t>(i)] * (lo + hi);
        k_abs += kKronrodWeights[static_cast<size_t>(i)] * (std::fabs(lo) + std::fabs(hi));
        if (i % 2 == 1) {
            g += kGaussWeights[static_cast<size_t>(i / 2)] * (lo + hi);
        }
    }
    return Panel{k * half, g * half, k_abs * std::fabs(half)};
}

void adapt(const std::function<double(double)> &f, double a, double b, double tol, int depth,
           AdaptiveResult &out) {
    const Panel p = gk15(f, a, b);
    out.evaluations += 15;
    const double err = std::fabs(p.kronrod - p.gauss);
    // Below this the estimate is rounding noise and bisection cannot help.
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * p.kronrod_abs;
    if (err <= tol || err <= floor || depth <= 0) {
        if (err > tol && err > floor) {
            out.converged = false;
        }
        out.value += p.kronrod;
        out.error_estimate += err;
        return;
    }
    const double mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * tol, depth - 1, out);
    adapt(f, mid, b, 0.5 * tol, depth - 1, out);
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                                  double abs_tol, int panels, int max_depth) {
    AdaptiveResult out;
    if (b == a) {
        return out;
    }
    require(panels >= 1, "integrate_adaptive: panels must be positive");
    const double width = (b - a) / panels;
    const double panel_tol = abs_tol / panels;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + width * i;
        const double hi = (i + 1 == panels) ? b : a + width * (i + 1);
        adapt(f, lo, hi, panel_tol, max_depth, out);
    }
    return out;
}

}  // namespace zpc
