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
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace zpc {

// Target AC Stark shift patterns F(rho, phi) on the unit disk. Each pattern is
// evaluated exactly as its closed form; amplitude() is the overall scale A used
// to normalize Zernike coefficients, peak() the actual maximum of |F|.

struct AnnulusShape {
    double r1;
    double r2;
    double kappa;
};

struct EllipticalGaussianShape {
    double eta_x;
    double eta_y;
};

struct DisplacedGaussianShape {
    double eta;
    double delta_x;
    double delta_y;
};

/// Samples on a regular polar grid, row-major in (rho, phi).
struct TabulatedShape {
    std::vector<double> rho;
    std::vector<double> phi;
    std::vector<double> values;
};

class TargetPattern {
   public:
    using Shape = std::variant<AnnulusShape, EllipticalGaussianShape, DisplacedGaussianShape, TabulatedShape>;

    static TargetPattern annulus(double amplitude, double r1, double r2, double kappa);
    static TargetPattern elliptical_gaussian(double amplitude, double eta_x, double eta_y);
    static TargetPattern displaced_gaussian(double amplitude, double eta, double delta_x, double delta_y);
    /// rho must start at 0 and end at 1; phi must be uniformly spaced and
    /// cover less than one period. Interpolation is bilinear, periodic in phi.
    static TargetPattern tabulated(double amplitude, TabulatedShape table);

    /// Reads "rho,phi,F" rows after a header line. When amplitude is not
    /// given, max |F| over the samples is used.
    static TargetPattern load_csv(const std::filesystem::path &path,
                                  std::optional<double> amplitude = std::nullopt);

    /// F(rho, phi); rho must lie in [0, 1].
    double operator()(double rho, double phi) const;

    double amplitude() const noexcept {
        return amplitude_;
    }
    double peak() const noexcept {
        return peak_;
    }
    const Shape &shape() const noexcept {
        return shape_;
    }
    std::string kind_name() const;

   private:
    TargetPattern(double amplitude, Shape shape);
    double evaluate(double rho, double phi) const;

    double amplitude_;
    Shape shape_;
    double annulus_norm_ = 1.0;
    double peak_ = 0.0;
};

}  // namespace zpc
