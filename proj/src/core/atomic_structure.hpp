// Copyright 2026 The ZMS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "zms_error.hpp"

namespace zms {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

/// Angular momentum quantum number stored as twice its value, so half-integers are exact.
class AngularMomentum {
 public:
  constexpr AngularMomentum() = default;
  static AngularMomentum from_twice(int two_f);
  static AngularMomentum from_double(double f);

  [[nodiscard]] constexpr int twice() const { return two_f_; }
  [[nodiscard]] constexpr double value() const { return 0.5 * two_f_; }
  [[nodiscard]] constexpr int multiplicity() const { return two_f_ + 1; }
  /// Twice the magnetic quantum number of basis state `index` (ordered m = -f .. +f).
  [[nodiscard]] constexpr int twice_m(int index) const { return -two_f_ + 2 * index; }

  friend constexpr bool operator==(AngularMomentum, AngularMomentum) = default;

 private:
  explicit constexpr AngularMomentum(int two_f) : two_f_(two_f) {}
  int two_f_ = 0;
};

struct LevelScheme {
  AngularMomentum fg;
  AngularMomentum fe;
  double gamma = 2.0 * std::numbers::pi * 5.2e6;  ///< excited-state decay rate, rad/s
  double g_ground = -0.25;
  double g_excited = 0.0;

  [[nodiscard]] int ground_dim() const { return fg.multiplicity(); }
  [[nodiscard]] int excited_dim() const { return fe.multiplicity(); }
  [[nodiscard]] int dim() const { return ground_dim() + excited_dim(); }

  /// Throws ConfigError unless the transition is dipole-allowed and gamma > 0.
  void validate() const;
};

/// Spherical components (q = -1, 0, +1) of a polarization vector.
struct SphericalPolarization {
  Complex e_minus{0.0};
  Complex e_zero{0.0};
  Complex e_plus{0.0};

  /// Component for q in {-1, 0, +1}.
  [[nodiscard]] Complex component(int q) const;
  [[nodiscard]] double norm() const;
  [[nodiscard]] SphericalPolarization normalized() const;
};

struct AngularMomentumMatrices {
  Operator fx;
  Operator fy;
  Operator fz;
};

AngularMomentumMatrices angular_momentum_matrices(AngularMomentum f);

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | j m>, all arguments doubled.
/// Racah closed form evaluated in exact rational arithmetic, Condon-Shortley phase.
double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2, int two_j, int two_m);

/// (2fe+1) x (2fg+1) real matrix, element (me, mg) = <fg mg; 1 q | fe me>.
Eigen::MatrixXd dipole_coupling(const LevelScheme& scheme, int q);

/// Expansion coefficients of a Cartesian (x, y, z) polarization vector in the spherical basis,
/// so sigma+ light (-(x + iy)/sqrt2) maps to e_plus = 1 and drives m -> m + 1.
/// Throws InvalidArgument for a zero vector.
SphericalPolarization spherical_components(const Eigen::Vector3cd& cartesian);

}  // namespace zms
