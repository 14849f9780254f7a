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

#include <cmath>

#include <Eigen/Eigenvalues>

#include "atomic_structure.hpp"
#include "doctest.h"

using namespace zms;

namespace {

// Coupled-basis oracle: diagonalize J^2 on j1 x j2 restricted to M = J, fix the sign so the
// m1 = j1 component is positive, then step down with J-. Independent of the Racah sum.
double cg_by_projection(int two_j1, int two_m1, int two_j2, int two_m2, int two_j, int two_m) {
  const auto a = angular_momentum_matrices(AngularMomentum::from_twice(two_j1));
  const auto b = angular_momentum_matrices(AngularMomentum::from_twice(two_j2));
  const int d1 = two_j1 + 1, d2 = two_j2 + 1;
  const Operator i1 = Operator::Identity(d1, d1), i2 = Operator::Identity(d2, d2);
  auto kron = [](const Operator& x, const Operator& y) {
    Operator out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      for (Eigen::Index c = 0; c < x.cols(); ++c) out.block(r * y.rows(), c * y.cols(), y.rows(), y.cols()) = x(r, c) * y;
    return out;
  };
  const Operator jx = kron(a.fx, i2) + kron(i1, b.fx);
  const Operator jy = kron(a.fy, i2) + kron(i1, b.fy);
  const Operator jz = kron(a.fz, i2) + kron(i1, b.fz);
  const Operator j2 = jx * jx + jy * jy + jz * jz;
  const Operator jminus = jx - Complex(0.0, 1.0) * jy;
  const double jv = 0.5 * two_j;

  // states with M = J
  std::vector<int> sub;
  for (int k = 0; k < d1 * d2; ++k)
    if (std::abs(jz(k, k).real() - jv) < 1e-9) sub.push_back(k);
  Eigen::MatrixXcd block(sub.size(), sub.size());
  for (std::size_t r = 0; r < sub.size(); ++r)
    for (std::size_t c = 0; c < sub.size(); ++c) block(r, c) = j2(sub[r], sub[c]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(block);
  int col = -1;
  for (int k = 0; k < eig.eigenvalues().size(); ++k)
    if (std::abs(eig.eigenvalues()(k) - jv * (jv + 1.0)) < 1e-8) col = k;
  REQUIRE(col >= 0);
  Eigen::VectorXcd top = Eigen::VectorXcd::Zero(d1 * d2);
  for (std::size_t r = 0; r < sub.size(); ++r) top(sub[r]) = eig.eigenvectors()(r, col);
  // m1 = j1 is index d1 - 1 in the first factor
  Complex lead(0.0);
  for (int k2 = 0; k2 < d2; ++k2)
    if (std::abs(top((d1 - 1) * d2 + k2)) > 1e-12) lead = top((d1 - 1) * d2 + k2);
  top *= std::conj(lead) / std::abs(lead);

  Eigen::VectorXcd state = top;
  for (int m2x = two_j; m2x > two_m; m2x -= 2) {
    state = jminus * state;
    state /= state.norm();
  }
  const int i = (two_m1 + two_j1) / 2, k = (two_m2 + two_j2) / 2;
  return state(i * d2 + k).real();
}

}  // namespace

TEST_SUITE("atomic-structure") {
  TEST_CASE("angular momentum matrices for f = 1") {
    const auto ops = angular_momentum_matrices(AngularMomentum::from_twice(2));
    CHECK(ops.fz(0, 0).real() == -1.0);
    CHECK(ops.fz(1, 1).real() == 0.0);
    CHECK(ops.fz(2, 2).real() == 1.0);
    const Operator raise = ops.fx + Complex(0.0, 1.0) * ops.fy;
    CHECK(std::abs(raise(1, 0) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(raise(2, 1) - std::sqrt(2.0)) < 1e-15);
  }

  TEST_CASE("angular momentum algebra for f up to 4") {
    for (int two_f = 0; two_f <= 8; ++two_f) {
      const AngularMomentum f = AngularMomentum::from_twice(two_f);
      const auto ops = angular_momentum_matrices(f);
      const Operator comm = ops.fx * ops.fy - ops.fy * ops.fx;
      CHECK((comm - Complex(0.0, 1.0) * ops.fz).cwiseAbs().maxCoeff() < 1e-12);
      const Operator casimir = ops.fx * ops.fx + ops.fy * ops.fy + ops.fz * ops.fz;
      const double ff = f.value() * (f.value() + 1.0);
      CHECK((casimir - ff * Operator::Identity(f.multiplicity(), f.multiplicity())).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((ops.fx - ops.fx.adjoint()).cwiseAbs().maxCoeff() == 0.0);
      CHECK((ops.fy - ops.fy.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("angular momentum construction") {
    CHECK(AngularMomentum::from_double(1.5).twice() == 3);
    CHECK(AngularMomentum::from_double(0.0).multiplicity() == 1);
    CHECK_THROWS_AS(AngularMomentum::from_double(0.3), InvalidArgument);
    CHECK_THROWS_AS(AngularMomentum::from_double(-1.0), InvalidArgument);
    CHECK_THROWS_AS(AngularMomentum::from_twice(-2), InvalidArgument);
  }

  TEST_CASE("Clebsch-Gordan matches the J^2 projection oracle") {
    for (int two_j1 = 0; two_j1 <= 6; ++two_j1)
      for (int two_j2 = 1; two_j2 <= 2; ++two_j2)
        for (int two_j = std::abs(two_j1 - two_j2); two_j <= two_j1 + two_j2; two_j += 2)
          for (int two_m1 = -two_j1; two_m1 <= two_j1; two_m1 += 2)
            for (int two_m2 = -two_j2; two_m2 <= two_j2; two_m2 += 2) {
              const int two_m = two_m1 + two_m2;
              if (std::abs(two_m) > two_j) continue;
              const double racah = clebsch_gordan(two_j1, two_m1, two_j2, two_m2, two_j, two_m);
              const double oracle = cg_by_projection(two_j1, two_m1, two_j2, two_m2, two_j, two_m);
              CAPTURE(two_j1);
              CAPTURE(two_j2);
              CAPTURE(two_j);
              CAPTURE(two_m1);
              CAPTURE(two_m2);
              CHECK(std::abs(racah - oracle) < 1e-10);
            }
  }

  TEST_CASE("Clebsch-Gordan known values and selection rules") {
    CHECK(std::abs(clebsch_gordan(1, 1, 1, -1, 0, 0) - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(clebsch_gordan(1, -1, 1, 1, 0, 0) + std::sqrt(0.5)) < 1e-15);
    CHECK(clebsch_gordan(2, 0, 2, 0, 2, 0) == 0.0);
    CHECK(clebsch_gordan(2, 2, 2, 0, 2, 0) == 0.0);
    CHECK(clebsch_gordan(2, 0, 2, 0, 8, 0) == 0.0);
    // large f stays finite and normalized: sum over m1 of <j1 m1; j2 m-m1|J M>^2 = 1
    double sum = 0.0;
    for (int two_m1 = -20; two_m1 <= 20; two_m1 += 2) {
      const double c = clebsch_gordan(20, two_m1, 20, -two_m1, 20, 0);
      sum += c * c;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }

  TEST_CASE("dipole coupling for fg = 1 -> fe = 0") {
    LevelScheme s{AngularMomentum::from_twice(2), AngularMomentum::from_twice(0)};
    const Eigen::MatrixXd dm = dipole_coupling(s, -1);
    CHECK(dm.rows() == 1);
    CHECK(dm.cols() == 3);
    CHECK(dm(0, 0) == 0.0);
    CHECK(dm(0, 1) == 0.0);
    CHECK(std::abs(std::abs(dm(0, 2)) - 1.0 / std::sqrt(3.0)) < 1e-15);
    CHECK_THROWS_AS(dipole_coupling(s, 2), InvalidArgument);
  }

  TEST_CASE("dipole coupling completeness for every allowed pair up to f = 4") {
    for (int two_fg = 0; two_fg <= 8; ++two_fg)
      for (int two_fe = two_fg >= 2 ? two_fg - 2 : two_fg % 2; two_fe <= std::min(8, two_fg + 2); two_fe += 2) {
        if (two_fg == 0 && two_fe == 0) continue;
        LevelScheme s{AngularMomentum::from_twice(two_fg), AngularMomentum::from_twice(two_fe)};
        Eigen::VectorXd rows = Eigen::VectorXd::Zero(s.excited_dim());
        for (int q = -1; q <= 1; ++q) {
          const Eigen::MatrixXd d = dipole_coupling(s, q);
          rows += d.rowwise().squaredNorm();
          for (int ie = 0; ie < s.excited_dim(); ++ie)
            for (int ig = 0; ig < s.ground_dim(); ++ig)
              if (s.fg.twice_m(ig) + 2 * q != s.fe.twice_m(ie)) CHECK(d(ie, ig) == 0.0);
        }
        CAPTURE(two_fg);
        CAPTURE(two_fe);
        CHECK((rows.array() - 1.0).abs().maxCoeff() < 1e-12);
      }
  }

  TEST_CASE("level scheme validation") {
    LevelScheme ok{AngularMomentum::from_twice(2), AngularMomentum::from_twice(0)};
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.dim() == 4);
    LevelScheme far{AngularMomentum::from_twice(0), AngularMomentum::from_twice(4)};
    CHECK_THROWS_AS(far.validate(), ConfigError);
    LevelScheme zero{AngularMomentum::from_twice(0), AngularMomentum::from_twice(0)};
    CHECK_THROWS_AS(zero.validate(), ConfigError);
    LevelScheme parity{AngularMomentum::from_twice(1), AngularMomentum::from_twice(2)};
    CHECK_THROWS_AS(parity.validate(), ConfigError);
    LevelScheme dead = ok;
    dead.gamma = 0.0;
    CHECK_THROWS_AS(dead.validate(), ConfigError);
  }

  TEST_CASE("spherical components") {
    const double s = std::sqrt(0.5);
    const auto z = spherical_components(Eigen::Vector3cd(0, 0, 1));
    CHECK(std::abs(z.e_zero - 1.0) < 1e-15);
    CHECK(std::abs(z.e_plus) == 0.0);
    const auto x = spherical_components(Eigen::Vector3cd(1, 0, 0));
    CHECK(std::abs(x.e_minus - s) < 1e-15);
    CHECK(std::abs(x.e_plus + s) < 1e-15);
    const Complex i(0.0, 1.0);
    const auto circ = spherical_components(Eigen::Vector3cd(s, i * s, 0));
    CHECK(std::abs(circ.e_minus) < 1e-15);
    CHECK(std::abs(circ.e_zero) < 1e-15);
    CHECK(std::abs(circ.e_plus + 1.0) < 1e-15);
    CHECK(std::abs(circ.component(1) + 1.0) < 1e-15);
    CHECK_THROWS_AS((void)circ.component(3), InvalidArgument);
    CHECK_THROWS_AS(spherical_components(Eigen::Vector3cd::Zero()), InvalidArgument);

    Eigen::Vector3cd v(Complex(0.3, -0.2), Complex(-1.1, 0.4), Complex(0.7, 0.9));
    CHECK(std::abs(spherical_components(v).norm() - v.norm()) < 1e-14);
    CHECK(std::abs(spherical_components(v).normalized().norm() - 1.0) < 1e-14);
  }
}
