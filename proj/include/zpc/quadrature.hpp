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

#include <functional>
#include <vector>

namespace zpc {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights on [lo, hi], nodes ascending.
QuadratureRule gauss_legendre(int count, double lo = -1.0, double hi = 1.0);

/// Tensor-product rule on the unit disk: Gauss-Legendre in rho (weights
/// carry the rho of the area element) times the periodic trapezoid rule in
/// phi. Exact for rho-polynomials of degree < 2 * radial_nodes, so products of
/// radial Zernike polynomials up to n = radial_nodes - 1 integrate exactly.
struct DiskRule {
    int radial_nodes = 96;
    int azimuthal_nodes = 512;

    std::vector<double> rho;            // radial_nodes values
    std::vector<double> radial_weight;  // w_i * rho_i
    std::vector<double> phi;            // azimuthal_nodes values
    double azimuthal_weight = 0.0;      // 2 pi / azimuthal_nodes

    static DiskRule make(int radial_nodes, int azimuthal_nodes);
};

struct AdaptiveResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
    bool converged = true;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b], first split
/// into `panels` equal pieces. Each piece is bisected until its error estimate
/// is below abs_tol * width / (b - a).
AdaptiveResult integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                                  double abs_tol, int panels = 1, int max_depth = 30);

}  // namespace zpc
