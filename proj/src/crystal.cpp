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

#include "zpc/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "zpc/error.hpp"

namespace zpc {

IonCrystal::IonCrystal(std::vector<PolarPoint> positions, double omega) : positions_(std::move(positions)), omega_(omega) {
    require(std::isfinite(omega_) && omega_ > 0.0, "crystal rotation frequency must be positive");
    for (const auto &p : positions_) {
        require(std::isfinite(p.rho) && std::isfinite(p.phi), "ion position is not finite");
        // Lattice construction can land a hair outside the disk.
        require(p.rho >= 0.0 && p.rho <= 1.0 + 1e-12, "ion lies outside the unit disk");
    }
    for (auto &p : positions_) {
        p.rho = std::min(p.rho, 1.0);
    }
    for (size_t i = 0; i < positions_.size(); ++i) {
        const double xi = positions_[i].rho * std::cos(positions_[i].phi);
        const double yi = positions_[i].rho * std::sin(positions_[i].phi);
        for (size_t j = i + 1; j < positions_.size(); ++j) {
            const double xj = positions_[j].rho * std::cos(positions_[j].phi);
            const double yj = positions_[j].rho * std::sin(positions_[j].phi);
            require(std::hypot(xi - xj, yi - yj) > 1e-12, "coincident ions in crystal");
        }
    }
}

void IonCrystal::save_csv(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write crystal file " + path.string());
    }
    out << "index,rho,phi\n";
    char buf[128];
    for (size_t i = 0; i < positions_.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, positions_[i].rho, positions_[i].phi);
        out << buf;
    }
}

IonCrystal IonCrystal::load_csv(const std::filesystem::path &path, double omega) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::kIo, "cannot open crystal file " + path.string());
    }
    std::string line;
    std::getline(in, line);
    std::vector<PolarPoint> pts;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        size_t index = 0;
        PolarPoint p{};
        if (!(ss >> index >> p.rho >> p.phi)) {
            fail(ErrorCode::kInvalidArgument, "malformed crystal row: " + line);
        }
        require(index == pts.size(), "crystal rows must be indexed 0, 1, 2, ...");
        pts.push_back(p);
    }
    return IonCrystal(std::move(pts), omega);
}

IonCrystal generate_hex_crystal(int shells, double spacing, double omega, double orientation) {
    require(shells >= 0, "hex crystal: shells must be non-negative");
    require(spacing > 0.0, "hex crystal: spacing must be positive");
    require(shells * spacing <= 1.0 + 1e-12, "hex crystal: lattice exceeds the unit disk");
    std::vector<PolarPoint> pts;
    const double s3 = std::sqrt(3.0);
    // Axial coordinates (q, r) with |q|, |r|, |q + r| <= shells.
    for (int r = -shells; r <= shells; ++r) {
        for (int q = -shells; q <= shells; ++q) {
            if (std::abs(q + r) > shells) {
                continue;
            }
            const double x = spacing * (q + 0.5 * r);
            const double y = spacing * (0.5 * s3 * r);
            double rho = std::hypot(x, y);
            double phi = rho == 0.0 ? 0.0 : std::atan2(y, x) + orientation;
            if (rho > 1.0) {
                rho = 1.0;
            }
            pts.push_back(PolarPoint{rho, phi});
        }
    }
    return IonCrystal(std::move(pts), omega);
}

CartesianPoint lab_position(const PolarPoint &ion, double t, double omega) {
    const double phi_lab = ion.phi - omega * t;
    return CartesianPoint{ion.rho * std::cos(phi_lab), ion.rho * std::sin(phi_lab)};
}

BeamGeometry::BeamGeometry(double theta) : theta_(theta) {
    require(theta > 0.0 && theta <= 0.5 * std::numbers::pi + 1e-15, "beam angle must lie in (0, pi/2]");
}

CartesianPoint mirror_to_crystal(double x_l, double z_l, const BeamGeometry &geometry) {
    return CartesianPoint{x_l, z_l / std::sin(geometry.theta())};
}

PlaneFunction dm_surface_pattern(PlaneFunction crystal_plane, const BeamGeometry &geometry) {
    return [f = std::move(crystal_plane), geometry](double x_l, double z_l) {
        const CartesianPoint c = mirror_to_crystal(x_l, z_l, geometry);
        if (std::hypot(c.x, c.y) > 1.0 + 1e-12) {
            fail(ErrorCode::kInvalidArgument, "mirror point maps outside the crystal disk");
        }
        return f(c.x, c.y);
    };
}

}  // namespace zpc
