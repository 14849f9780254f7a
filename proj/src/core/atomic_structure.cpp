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

#include "atomic_structure.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace zms {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int factorial(int n) {
  cpp_int r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Halves a doubled quantity that is known to be an even integer.
int half(int twice) { return twice / 2; }

}  // namespace

AngularMomentum AngularMomentum::from_twice(int two_f) {
  if (two_f < 0) throw InvalidArgument("angular momentum must be non-negative");
  return AngularMomentum(two_f);
}

AngularMomentum AngularMomentum::from_double(double f) {
  const double twice = 2.0 * f;
  const double rounded = std::round(twice);
  if (!std::isfinite(f) || f < 0.0 || std::abs(twice - rounded) > 1e-9)
    throw InvalidArgument("angular momentum must be a non-negative integer or half-integer, got " +
                          std::to_string(f));
  return AngularMomentum(static_cast<int>(rounded));
}

void LevelScheme::validate() const {
  if (std::abs(fg.twice() - fe.twice()) > 2)
    throw ConfigError("scheme", "transition fg -> fe is not dipole allowed (|fg - fe| > 1)");
  if (fg.twice() == 0 && fe.twice() == 0)
    throw ConfigError("scheme", "0 -> 0 transition has no dipole coupling");
  if ((fg.twice() - fe.twice()) % 2 != 0)
    throw ConfigError("scheme", "fg and fe must both be integer or both half-integer");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("scheme.gamma", "must be positive");
}

Complex SphericalPolarization::component(int q) const {
  switch (q) {
    case -1: return e_minus;
    case 0: return e_zero;
    case 1: return e_plus;
    default: throw InvalidArgument("spherical index q must be -1, 0 or +1");
  }
}

double SphericalPolarization::norm() const {
  return std::sqrt(std::norm(e_minus) + std::norm(e_zero) + std::norm(e_plus));
}

SphericalPolarization SphericalPolarization::normalized() const {
  const double n = norm();
  if (n == 0.0) throw InvalidArgument("cannot normalize a zero polarization");
  return {e_minus / n, e_zero / n, e_plus / n};
}

AngularMomentumMatrices angular_momentum_matrices(AngularMomentum f) {
  const int dim = f.multiplicity();
  const double fv = f.value();
  Operator fz = Operator::Zero(dim, dim);
  Operator raise = Operator::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double m = 0.5 * f.twice_m(i);
    fz(i, i) = m;
    // <m+1|F+|m> = sqrt(f(f+1) - m(m+1))
    if (i + 1 < dim) raise(i + 1, i) = std::sqrt(fv * (fv + 1.0) - m * (m + 1.0));
  }
  const Operator lower = raise.adjoint();
  const Complex i_unit(0.0, 1.0);
  return {0.5 * (raise + lower), (raise - lower) / (2.0 * i_unit), fz};
}

double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2, int two_j, int two_m) {
  if (two_m1 + two_m2 != two_m) return 0.0;
  if (std::abs(two_m1) > two_j1 || std::abs(two_m2) > two_j2 || std::abs(two_m) > two_j) return 0.0;
  if ((two_j1 + two_m1) % 2 || (two_j2 + two_m2) % 2 || (two_j + two_m) % 2) return 0.0;
  if (two_j < std::abs(two_j1 - two_j2) || two_j > two_j1 + two_j2) return 0.0;
  if ((two_j1 + two_j2 + two_j) % 2) return 0.0;

  const int a = half(two_j1 + two_j2 - two_j);   // j1 + j2 - J
  const int b = half(two_j1 - two_m1);           // j1 - m1
  const int c = half(two_j2 + two_m2);           // j2 + m2
  const int d = half(two_j - two_j2 + two_m1);   // J - j2 + m1
  const int e = half(two_j - two_j1 - two_m2);   // J - j1 - m2

  cpp_rational sum = 0;
  for (int k = std::max({0, -d, -e}); k <= std::min({a, b, c}); ++k) {
    const cpp_int denom = factorial(k) * factorial(a - k) * factorial(b - k) * factorial(c - k) *
                          factorial(d + k) * factorial(e + k);
    const cpp_rational term(cpp_int(1), denom);
    sum += (k % 2 == 0) ? term : cpp_rational(-term);
  }
  if (sum == 0) return 0.0;

  const cpp_int prefactor_num = cpp_int(two_j + 1) * factorial(half(two_j + two_j1 - two_j2)) *
                                factorial(half(two_j - two_j1 + two_j2)) * factorial(a) *
                                factorial(half(two_j + two_m)) * factorial(half(two_j - two_m)) *
                                factorial(half(two_j1 - two_m1)) * factorial(half(two_j1 + two_m1)) *
                                factorial(half(two_j2 - two_m2)) * factorial(half(two_j2 + two_m2));
  const cpp_int prefactor_den = factorial(half(two_j1 + two_j2 + two_j) + 1);
  const cpp_rational squared = cpp_rational(prefactor_num, prefactor_den) * sum * sum;
  const double magnitude = std::sqrt(squared.convert_to<double>());
  return sum > 0 ? magnitude : -magnitude;
}

Eigen::MatrixXd dipole_coupling(const LevelScheme& scheme, int q) {
  if (q < -1 || q > 1) throw InvalidArgument("spherical index q must be -1, 0 or +1");
  const int ng = scheme.ground_dim();
  const int ne = scheme.excited_dim();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ne, ng);
  for (int ie = 0; ie < ne; ++ie) {
    const int two_me = scheme.fe.twice_m(ie);
    for (int ig = 0; ig < ng; ++ig) {
      const int two_mg = scheme.fg.twice_m(ig);
      if (two_mg + 2 * q != two_me) continue;
      d(ie, ig) = clebsch_gordan(scheme.fg.twice(), two_mg, 2, 2 * q, scheme.fe.twice(), two_me);
    }
  }
  return d;
}

SphericalPolarization spherical_components(const Eigen::Vector3cd& cartesian) {
  if (cartesian.squaredNorm() == 0.0) throw InvalidArgument("polarization vector must be nonzero");
  const Complex i_unit(0.0, 1.0);
  const double s = std::sqrt(0.5);
  // c_q = conj(e_q) . v with e_{+1} = -(x + iy)/sqrt2, e_{-1} = (x - iy)/sqrt2
  return {s * (cartesian.x() + i_unit * cartesian.y()), cartesian.z(),
          -s * (cartesian.x() - i_unit * cartesian.y())};
}

}  // namespace zms
