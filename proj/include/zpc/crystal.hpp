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
#include <functional>
#include <vector>

namespace zpc {

/// A point on the unit disk in polar coordinates (rotating frame for ions).
struct PolarPoint {
    double rho;
    double phi;
};

struct CartesianPoint {
    double x;
    double y;
};

/// Ion positions in the frame co-rotating with the crystal, plus the
/// rotation rate omega (rad/s).
class IonCrystal {
   public:
    IonCrystal(std::vector<PolarPoint> positions, double omega);

    const std::vector<PolarPoint> &positions() const noexcept {
        return positions_;
    }
    size_t size() const noexcept {
        return positions_.size();
    }
    const PolarPoint &operator[](size_t i) const {
        return positions_[i];
    }
    double omega() const noexcept {
        return omega_;
    }
    IonCrystal with_omega(double omega) const {
        return IonCrystal(positions_, omega);
    }

    /// CSV rows "index,rho,phi". omega is not stored in the file.
    void save_csv(const std::filesystem::path &path) const;
    static IonCrystal load_csv(const std::filesystem::path &path, double omega);

   private:
    std::vector<PolarPoint> positions_;
    double omega_;
};

/// Centered triangular lattice with 1 + 3 s (s + 1) sites and nearest-neighbour
/// distance `spacing`. One lattice axis sits at phi = orientation.
IonCrystal generate_hex_crystal(int shells, double spacing, double omega, double orientation = 0.0);

/// Lab-frame Cartesian position at time t: phi_lab = phi - omega t.
CartesianPoint lab_position(const PolarPoint &ion, double t, double omega);

/// Beam angle to the y axis; 0 < theta <= pi/2.
class BeamGeometry {
   public:
    explicit BeamGeometry(double theta);
    double theta() const noexcept {
        return theta_;
    }

   private:
    double theta_;
};

using PlaneFunction = std::function<double(double, double)>;

/// Mirror-plane phase map delta_u(x_L, z_L) = delta(x_L, z_L / sin(theta)).
/// The returned function throws if the mapped point leaves the unit disk.
PlaneFunction dm_surface_pattern(PlaneFunction crystal_plane, const BeamGeometry &geometry);

/// Inverse mapping: crystal-plane coordinates of a mirror-plane point.
CartesianPoint mirror_to_crystal(double x_l, double z_l, const BeamGeometry &geometry);

}  // namespace zpc
