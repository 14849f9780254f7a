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

#include "classical.hpp"

#include <cmath>
#include <limits>

namespace zms {

void DipoleEnsemble::validate() const {
  if (!mu0.allFinite() || std::abs(mu0.norm() - 1.0) > 1e-12)
    throw ConfigError("classical.mu0", "must be a unit vector");
  if (gyro == 0.0 || !std::isfinite(gyro)) throw ConfigError("classical.gyro", "must be finite and nonzero");
  env.validate();
}

Eigen::Vector3d precess(const Eigen::Vector3d& mu, const Eigen::Vector3d& b, double gyro, double t) {
  const double magnitude = b.norm();
  if (magnitude == 0.0) return mu;
  const Eigen::Vector3d k = b / magnitude;
  const double angle = gyro * magnitude * t;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return mu * c + k.cross(mu) * s + k * (k.dot(mu) * (1.0 - c));
}

MomentTrajectory total_moment(const DipoleEnsemble& ensemble, const std::vector<double>& times) {
  ensemble.validate();
  const auto samples = sample_fields(ensemble.env);
  double weight_sum = 0.0;
  for (const auto& s : samples) weight_sum += s.weight;

  MomentTrajectory out;
  out.times = times;
  out.moment.reserve(times.size());
  for (double t : times) {
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (const auto& s : samples) m += s.weight * precess(ensemble.mu0, s.b, ensemble.gyro, t);
    out.moment.push_back(m / weight_sum);
  }
  return out;
}

double moment_decay_time(const MomentTrajectory& trajectory) {
  const double threshold = std::exp(-1.0);
  for (std::size_t i = 1; i < trajectory.times.size(); ++i) {
    const double a = trajectory.moment[i - 1].norm();
    const double b = trajectory.moment[i].norm();
    if (b <= threshold && a > threshold) {
      const double t0 = trajectory.times[i - 1];
      return t0 + (a - threshold) / (a - b) * (trajectory.times[i] - t0);
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace zms
