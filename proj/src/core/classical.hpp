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

#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "ensemble.hpp"

namespace zms {

/// |g| mu_B / hbar for g = -1/4, rad/s per gauss.
inline constexpr double kDefaultGyro = 2.0 * std::numbers::pi * 0.25 * 1.399624e6;

struct DipoleEnsemble {
  Eigen::Vector3d mu0 = Eigen::Vector3d::UnitY();
  double gyro = kDefaultGyro;  ///< rad/s per gauss
  MagneticEnvironment env;

  void validate() const;
};

/// Rotation of mu about b by the angle gyro |b| t (Rodrigues formula).
Eigen::Vector3d precess(const Eigen::Vector3d& mu, const Eigen::Vector3d& b, double gyro, double t);

struct MomentTrajectory {
  std::vector<double> times;  ///< seconds
  std::vector<Eigen::Vector3d> moment;
};

MomentTrajectory total_moment(const DipoleEnsemble& ensemble, const std::vector<double>& times);

/// First time |M(t)| drops to 1/e, linearly interpolated; infinity if it never does.
double moment_decay_time(const MomentTrajectory& trajectory);

}  // namespace zms
